#pragma once

// Combinatorial reference methods that only look at f on the 2^n vertices of
// the box [r, s]: brute-force Shapley-Shubik over all n! variable orders,
// random-order methods with arbitrary order weights, and value-variant
// random-order methods whose weights may depend on (r, s).

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "attrib/characteristic.hpp"

namespace attrib {

using Evaluator = std::function<double(std::span<const double>)>;

Evaluator evaluator_of(const CharacteristicFunction& f);

/// Largest n accepted by the enumeration-based oracles (10! orders).
inline constexpr std::size_t kOracleMaxVars = 10;

/// A variable order.  rank[i] is the 0-based step at which variable i moves
/// from r_i to s_i; the identity moves variable 0 first.
using Permutation = std::vector<Index>;

/// Corner u^I of [r, s]: s on I, r elsewhere.
std::vector<double> vertex_value(const ValuePair& vp, std::span<const Index> subset);

class PermutationWeights {
public:
  explicit PermutationWeights(std::size_t n) : n_(n) {}

  static PermutationWeights uniform(std::size_t n);
  static PermutationWeights single(Permutation rank);

  /// Adds weight to a permutation (accumulates on repeats).
  PermutationWeights& add(Permutation rank, double weight);

  std::size_t n() const { return n_; }
  const std::map<Permutation, double>& entries() const { return weights_; }

  /// Throws unless all weights are >= 0 and sum to 1 within 1e-12.
  void validate() const;

private:
  std::size_t n_;
  std::map<Permutation, double> weights_;
};

/// Uniform average of the n! order marginals; vertex values are memoised.
AttributionResult shapley_shubik_bruteforce(const Evaluator& f, const ValuePair& vp);
AttributionResult shapley_shubik_bruteforce(const CharacteristicFunction& f,
                                            const ValuePair& vp);

AttributionResult random_order_attribution(const Evaluator& f, const ValuePair& vp,
                                           const PermutationWeights& weights);
AttributionResult random_order_attribution(const CharacteristicFunction& f,
                                           const ValuePair& vp,
                                           const PermutationWeights& weights);

/// Non-negative, not necessarily normalised weight of an order given (r, s).
using OrderWeightRule = std::function<double(const ValuePair&, const Permutation&)>;

/// Weights every one of the n! orders by rule(vp, order), normalised to sum 1.
AttributionResult value_variant_attribution(const Evaluator& f, const ValuePair& vp,
                                            const OrderWeightRule& rule);

/// Deterministic hash of (r, s, order) into [0, 1): 64-bit FNV-1a over the
/// IEEE-754 bit patterns of r then s (little-endian byte order) followed by the
/// ranks as 64-bit integers, mapped to [0, 1) by its top 53 bits.
double order_hash(const ValuePair& vp, const Permutation& rank);

/// Value-variant method with order weights proportional to 1 + order_hash.
AttributionResult value_variant_example(const Evaluator& f, const ValuePair& vp);

}  // namespace attrib
