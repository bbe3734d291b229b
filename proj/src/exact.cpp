#include "attrib/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace attrib {

double shapley_weight(std::size_t k, std::size_t n) {
  if (n == 0 || k >= n) {
    throw std::out_of_range("shapley_weight: need 0 <= k < n, got k = " + std::to_string(k) +
                            ", n = " + std::to_string(n));
  }
  // w_{j+1} = w_j (j+1) / (n-1-j); walk from the nearer end since w is symmetric.
  const std::size_t steps = std::min(k, n - 1 - k);
  double w = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < steps; ++j) {
    w *= static_cast<double>(j + 1) / static_cast<double>(n - 1 - j);
  }
  return w;
}

ShapleyWeightTable::ShapleyWeightTable(std::size_t n) {
  if (n == 0) {
    throw std::out_of_range("ShapleyWeightTable: n must be positive");
  }
  weights_.resize(n);
  weights_[0] = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    weights_[k + 1] =
        weights_[k] * static_cast<double>(k + 1) / static_cast<double>(n - 1 - k);
  }
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) {
    return 0.0;
  }
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) {
    c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return c;
}

SubsetSumRows::SubsetSumRows(std::size_t max_vars) {
  current_.reserve(max_vars + 1);
  previous_.reserve(max_vars + 1);
  reset();
}

void SubsetSumRows::reset() {
  m_ = 0;
  current_.assign(1, 1.0);
  previous_.clear();
}

void SubsetSumRows::push(double r, double s) {
  std::swap(current_, previous_);
  const std::size_t m = m_ + 1;
  const double inv_m = 1.0 / static_cast<double>(m);
  current_.resize(m + 1);
  current_[0] = r * previous_[0];
  for (std::size_t k = 1; k < m; ++k) {
    const double share = static_cast<double>(k) * inv_m;
    current_[k] = share * s * previous_[k - 1] + (1.0 - share) * r * previous_[k];
  }
  current_[m] = s * previous_[m - 1];
  m_ = m;
}

namespace {

class Accumulator {
public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}

  void add(double v) {
    if (!compensated_) {
      sum_ += v;
      return;
    }
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

private:
  bool compensated_;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double attribute_monomial(double coeff, std::span<const Index> monomial,
                          const ValuePair& vp, Index i, const DpOptions& options) {
  SubsetSumRows workspace(monomial.size());
  return attribute_monomial(coeff, monomial, vp, i, workspace, options);
}

double attribute_monomial(double coeff, std::span<const Index> monomial,
                          const ValuePair& vp, Index i, SubsetSumRows& workspace,
                          const DpOptions& options) {
  if (std::find(monomial.begin(), monomial.end(), i) == monomial.end()) {
    throw std::invalid_argument("attribute_monomial: variable " + std::to_string(i) +
                                " is not in the monomial");
  }
  for (Index j : monomial) {
    if (j >= vp.n()) {
      throw DimensionError("attribute_monomial: monomial index out of range");
    }
  }
  workspace.reset();
  for (Index j : monomial) {
    if (j != i) {
      workspace.push(vp.r[j], vp.s[j]);
    }
  }
  // sum_k w(k, m) X_{k, m-1} = sum_k w(k, m) C(m-1, k) M_k, and
  // w(k, m) C(m-1, k) = 1/m for every k.
  const std::size_t m = monomial.size();
  Accumulator sum(options.compensated);
  for (double mean : workspace.means()) {
    sum.add(mean);
  }
  return coeff * vp.delta(i) * sum.value() / static_cast<double>(m);
}

void require_matching_dimension(const CharacteristicFunction& f, const ValuePair& vp) {
  if (f.n() != vp.n()) {
    throw DimensionError("function has " + std::to_string(f.n()) +
                         " variables but values have " + std::to_string(vp.n()));
  }
}

AttributionResult attribute_ass(const CharacteristicFunction& f, const ValuePair& vp,
                                const DpOptions& options) {
  require_matching_dimension(f, vp);
  const std::size_t n = f.n();
  AttributionResult result;
  result.method = "ass";
  result.z.assign(n, 0.0);

  std::size_t widest = 0;
  for (const auto& [indices, coeff] : f.multilinear().terms()) {
    widest = std::max(widest, indices.size());
  }
  SubsetSumRows workspace(widest);
  // Monomials in ascending key order so the reduction is reproducible.
  for (const auto& [indices, coeff] : f.multilinear().terms()) {
    for (Index i : indices) {
      result.z[i] += attribute_monomial(coeff, indices, vp, i, workspace, options);
    }
  }
  for (const auto& term : f.separable()) {
    result.z[term.var] += term.evaluate(vp.s[term.var]) - term.evaluate(vp.r[term.var]);
  }
  attach_residual(result, f.evaluate(vp.r), f.evaluate(vp.s));
  return result;
}

AttributionResult attribute_naive(const CharacteristicFunction& f, const ValuePair& vp) {
  require_matching_dimension(f, vp);
  AttributionResult result;
  result.method = "naive";
  result.z.resize(f.n());
  for (Index i = 0; i < f.n(); ++i) {
    result.z[i] = partial_derivative(f, i).evaluate(vp.s) * vp.delta(i);
  }
  attach_residual(result, f.evaluate(vp.r), f.evaluate(vp.s));
  return result;
}

}  // namespace attrib
