#include "attrib/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace attrib {

Evaluator evaluator_of(const CharacteristicFunction& f) {
  return [f](std::span<const double> x) { return f.evaluate(x); };
}

std::vector<double> vertex_value(const ValuePair& vp, std::span<const Index> subset) {
  std::vector<double> u = vp.r;
  for (Index i : subset) {
    if (i >= vp.n()) {
      throw DimensionError("vertex_value: index " + std::to_string(i) + " out of range");
    }
    u[i] = vp.s[i];
  }
  return u;
}

PermutationWeights PermutationWeights::uniform(std::size_t n) {
  PermutationWeights pw(n);
  Permutation rank(n);
  std::iota(rank.begin(), rank.end(), Index{0});
  double count = 1.0;
  for (std::size_t k = 2; k <= n; ++k) count *= static_cast<double>(k);
  do {
    pw.weights_[rank] = 1.0 / count;
  } while (std::next_permutation(rank.begin(), rank.end()));
  return pw;
}

PermutationWeights PermutationWeights::single(Permutation rank) {
  PermutationWeights pw(rank.size());
  pw.add(std::move(rank), 1.0);
  return pw;
}

PermutationWeights& PermutationWeights::add(Permutation rank, double weight) {
  require_valid_permutation(rank, n_);
  weights_[std::move(rank)] += weight;
  return *this;
}

void PermutationWeights::validate() const {
  double sum = 0.0;
  for (const auto& [rank, w] : weights_) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("permutation weight must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("permutation weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
}

namespace {

void require_oracle_size(std::size_t n) {
  if (n > kOracleMaxVars) {
    throw std::invalid_argument("order enumeration supports at most " +
                                std::to_string(kOracleMaxVars) + " variables, got " +
                                std::to_string(n));
  }
}

// f on the vertices of [r, s], keyed by the bitmask of coordinates set to s.
class VertexTable {
public:
  VertexTable(const Evaluator& f, const ValuePair& vp)
      : f_(f), vp_(vp), values_(std::size_t{1} << vp.n()), known_(values_.size(), false) {}

  double operator()(std::uint32_t mask) {
    if (!known_[mask]) {
      std::vector<double> u = vp_.r;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (mask & (1u << i)) u[i] = vp_.s[i];
      }
      values_[mask] = f_(u);
      known_[mask] = true;
    }
    return values_[mask];
  }

private:
  const Evaluator& f_;
  const ValuePair& vp_;
  std::vector<double> values_;
  std::vector<bool> known_;
};

// Adds weight * (marginal of each variable along the order) into z.
void accumulate_order(VertexTable& table, const Permutation& rank, double weight,
                      std::vector<double>& z, std::vector<Index>& order) {
  const std::size_t n = rank.size();
  for (Index i = 0; i < n; ++i) order[rank[i]] = i;
  std::uint32_t mask = 0;
  double before = table(mask);
  for (std::size_t step = 0; step < n; ++step) {
    const Index i = order[step];
    mask |= 1u << i;
    const double after = table(mask);
    z[i] += weight * (after - before);
    before = after;
  }
}

AttributionResult finish(std::string method, std::vector<double> z, VertexTable& table,
                         std::size_t n) {
  AttributionResult result;
  result.method = std::move(method);
  result.z = std::move(z);
  const std::uint32_t full = n == 0 ? 0u : static_cast<std::uint32_t>((1u << n) - 1u);
  attach_residual(result, table(0), table(full));
  return result;
}

}  // namespace

AttributionResult shapley_shubik_bruteforce(const Evaluator& f, const ValuePair& vp) {
  const std::size_t n = vp.n();
  require_oracle_size(n);
  VertexTable table(f, vp);
  std::vector<double> z(n, 0.0);
  std::vector<Index> order(n);
  Permutation rank(n);
  std::iota(rank.begin(), rank.end(), Index{0});
  double count = 0.0;
  // Lexicographic order of ranks fixes the summation order.
  do {
    accumulate_order(table, rank, 1.0, z, order);
    count += 1.0;
  } while (std::next_permutation(rank.begin(), rank.end()));
  for (double& v : z) v /= count;
  return finish("ss-brute", std::move(z), table, n);
}

AttributionResult shapley_shubik_bruteforce(const CharacteristicFunction& f,
                                            const ValuePair& vp) {
  if (f.n() != vp.n()) {
    throw DimensionError("ss-brute: dimension mismatch");
  }
  return shapley_shubik_bruteforce(evaluator_of(f), vp);
}

AttributionResult random_order_attribution(const Evaluator& f, const ValuePair& vp,
                                           const PermutationWeights& weights) {
  const std::size_t n = vp.n();
  require_oracle_size(n);
  if (weights.n() != n) {
    throw DimensionError("permutation weights are for " + std::to_string(weights.n()) +
                         " variables, values have " + std::to_string(n));
  }
  weights.validate();
  VertexTable table(f, vp);
  std::vector<double> z(n, 0.0);
  std::vector<Index> order(n);
  for (const auto& [rank, w] : weights.entries()) {
    if (w != 0.0) accumulate_order(table, rank, w, z, order);
  }
  return finish("random-order", std::move(z), table, n);
}

AttributionResult random_order_attribution(const CharacteristicFunction& f,
                                           const ValuePair& vp,
                                           const PermutationWeights& weights) {
  if (f.n() != vp.n()) {
    throw DimensionError("random-order: dimension mismatch");
  }
  return random_order_attribution(evaluator_of(f), vp, weights);
}

AttributionResult value_variant_attribution(const Evaluator& f, const ValuePair& vp,
                                            const OrderWeightRule& rule) {
  const std::size_t n = vp.n();
  require_oracle_size(n);
  VertexTable table(f, vp);
  std::vector<double> z(n, 0.0);
  std::vector<Index> order(n);
  Permutation rank(n);
  std::iota(rank.begin(), rank.end(), Index{0});
  double total_weight = 0.0;
  do {
    const double w = rule(vp, rank);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("order weight rule returned an invalid weight");
    }
    if (w != 0.0) accumulate_order(table, rank, w, z, order);
    total_weight += w;
  } while (std::next_permutation(rank.begin(), rank.end()));
  if (!(total_weight > 0.0)) {
    throw std::invalid_argument("order weight rule gives zero total weight");
  }
  for (double& v : z) v /= total_weight;
  return finish("value-variant", std::move(z), table, n);
}

double order_hash(const ValuePair& vp, const Permutation& rank) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t word) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (word >> (8 * byte)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  for (double v : vp.r) mix(std::bit_cast<std::uint64_t>(v));
  for (double v : vp.s) mix(std::bit_cast<std::uint64_t>(v));
  for (Index k : rank) mix(static_cast<std::uint64_t>(k));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

AttributionResult value_variant_example(const Evaluator& f, const ValuePair& vp) {
  auto result = value_variant_attribution(
      f, vp, [](const ValuePair& v, const Permutation& rank) { return 1.0 + order_hash(v, rank); });
  result.method = "value-variant-hash";
  return result;
}

}  // namespace attrib
