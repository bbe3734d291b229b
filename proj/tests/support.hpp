#pragma once

// Test-only reference computations, deliberately independent of the library's
// DP, permutation walk, and Gauss-Legendre code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "attrib/characteristic.hpp"

namespace attrib::testing {

/// X_{k,m} = sum over k-subsets K of [m] of s_K r_{[m]-K}, by enumerating all
/// 2^m subsets.
inline double subset_sum_bruteforce(std::span<const double> r, std::span<const double> s,
                                    std::size_t k) {
  const std::size_t m = r.size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
    double term = 1.0;
    for (std::size_t j = 0; j < m; ++j) term *= (mask >> j) & 1u ? s[j] : r[j];
    total += term;
  }
  return total;
}

/// Shapley value over coalitions: z_i = sum_{J not containing i}
/// |J|! (n-1-|J|)! / n! * (f(u^{J+i}) - f(u^J)), factorials via tgamma.
inline std::vector<double> shapley_subset_formula(
    const std::function<double(std::span<const double>)>& f, const ValuePair& vp) {
  const std::size_t n = vp.n();
  std::vector<double> z(n, 0.0);
  auto vertex = [&](std::uint64_t mask) {
    std::vector<double> u = vp.r;
    for (std::size_t j = 0; j < n; ++j) {
      if ((mask >> j) & 1u) u[j] = vp.s[j];
    }
    return f(u);
  };
  const double n_fact = std::tgamma(static_cast<double>(n) + 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      if ((mask >> i) & 1u) continue;
      const double k = __builtin_popcountll(mask);
      const double w = std::tgamma(k + 1.0) * std::tgamma(n - k) / n_fact;
      z[i] += w * (vertex(mask | (std::uint64_t{1} << i)) - vertex(mask));
    }
  }
  return z;
}

/// Composite Simpson rule with `intervals` (even) subintervals.
inline double simpson(const std::function<double(double)>& g, double a, double b,
                      int intervals) {
  const double h = (b - a) / intervals;
  double sum = g(a) + g(b);
  for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * g(a + k * h);
  return sum * h / 3.0;
}

inline double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace attrib::testing
