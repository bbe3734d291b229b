#pragma once

// Exact Aumann-Shapley-Shubik attribution for multilinear + separable f.
//
// For a single monomial x_I and a variable i in I the attribution is
//
//   z_i = (s_i - r_i) * sum_{K subset I\{i}} w(|K|, |I|) * s_K * r_{I\{i}\K}
//
// with Shapley order weights w(k, m) = k! (m-1-k)! / m!.  The inner sums are
// grouped by |K| and built with an O(m^2) time, O(m) memory row recursion.
// Separable terms contribute f_i(s_i) - f_i(r_i) to their own variable.

#include <cstddef>
#include <span>
#include <vector>

#include "attrib/characteristic.hpp"

namespace attrib {

/// k! (n-1-k)! / n!, built multiplicatively from w(0, n) = 1/n.
double shapley_weight(std::size_t k, std::size_t n);

class ShapleyWeightTable {
public:
  explicit ShapleyWeightTable(std::size_t n);

  std::size_t n() const { return weights_.size(); }
  double operator[](std::size_t k) const { return weights_[k]; }
  std::span<const double> weights() const { return weights_; }

private:
  std::vector<double> weights_;
};

/// C(n, k) as a double, computed multiplicatively.
double binomial(std::size_t n, std::size_t k);

/// Row recursion over the elementary "mixed" symmetric sums
///
///   X_{k,m} = sum_{K subset [m], |K| = k} s_K r_{[m]-K}.
///
/// The rows are stored normalised by C(m, k), i.e. as the mean of s_K r_{[m]-K}
/// over all k-subsets:
///
///   M_{k,m} = (k/m) s_m M_{k-1,m-1} + ((m-k)/m) r_m M_{k,m-1},   M_{0,0} = 1.
///
/// This is the same recursion as for X with every row rescaled, and keeps
/// values O(max|r|,|s|)^m instead of O(2^m).  Only two rows are kept.
class SubsetSumRows {
public:
  /// Reserves two rows able to hold up to `max_vars` pushed variables.
  explicit SubsetSumRows(std::size_t max_vars);

  void reset();
  /// Appends one variable with initial value r and final value s.
  void push(double r, double s);

  std::size_t size() const { return m_; }
  /// Mean of s_K r_{[m]-K} over |K| = k.
  double mean(std::size_t k) const { return current_[k]; }
  std::span<const double> means() const { return {current_.data(), m_ + 1}; }
  /// Un-normalised X_{k,m}; overflows for large m, intended for small m.
  double x(std::size_t k) const { return binomial(m_, k) * current_[k]; }

  std::size_t row_capacity() const { return current_.capacity(); }
  static constexpr std::size_t row_count() { return 2; }

private:
  std::size_t m_ = 0;
  std::vector<double> current_;
  std::vector<double> previous_;
};

struct DpOptions {
  /// Neumaier-compensated accumulation of the final weighted sum.
  bool compensated = false;
};

/// Attribution of coeff * x_I to variable i (i must be in I).
double attribute_monomial(double coeff, std::span<const Index> monomial,
                          const ValuePair& vp, Index i, const DpOptions& options = {});

/// Same, reusing a caller-owned workspace (no allocation when large enough).
double attribute_monomial(double coeff, std::span<const Index> monomial,
                          const ValuePair& vp, Index i, SubsetSumRows& workspace,
                          const DpOptions& options = {});

AttributionResult attribute_ass(const CharacteristicFunction& f, const ValuePair& vp,
                                const DpOptions& options = {});

/// Endpoint-gradient baseline z_i = d_i f(s) (s_i - r_i); not complete in general.
AttributionResult attribute_naive(const CharacteristicFunction& f, const ValuePair& vp);

void require_matching_dimension(const CharacteristicFunction& f, const ValuePair& vp);

}  // namespace attrib
