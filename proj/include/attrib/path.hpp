#pragma once

// Path attribution by numerical integration:
//
//   z_i = int_0^1 d_i f(gamma(t)) * gamma_i'(t) dt,
//   gamma(t) = r + (s - r) o base(t)
//
// for a monotone base path on the unit cube (straight line, hypercube edge
// walk, or a tabulated user path).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "attrib/characteristic.hpp"
#include "attrib/oracle.hpp"
#include "attrib/quadrature.hpp"

namespace attrib {

/// Shape-preserving piecewise cubic through (t_k, y_k) with non-decreasing y.
class MonotoneCubic {
public:
  MonotoneCubic(std::vector<double> knots, std::vector<double> values);

  double value(double t) const;
  double derivative(double t) const;
  std::span<const double> knots() const { return knots_; }

private:
  std::size_t segment(double t) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

class BasePath {
public:
  enum class Kind { StraightLine, EdgeWalk, Tabulated };

  static BasePath straight_line(std::size_t n);
  /// Moves one coordinate at a time from 0 to 1; variable i moves during
  /// t in [rank[i]/n, (rank[i]+1)/n].
  static BasePath edge_walk(Permutation rank);
  /// Component i interpolates (knots[k], samples[i][k]); each sample row must
  /// start at 0, end at 1, and be non-decreasing; knots must span [0, 1].
  static BasePath tabulated(std::vector<double> knots,
                            const std::vector<std::vector<double>>& samples);

  Kind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  const Permutation& rank() const { return rank_; }

  double component(Index i, double t) const;
  double component_derivative(Index i, double t) const;
  /// Interior points where the path may fail to be smooth, plus 0 and 1.
  std::vector<double> breakpoints() const;

private:
  BasePath(Kind kind, std::size_t n) : kind_(kind), n_(n) {}

  Kind kind_;
  std::size_t n_;
  Permutation rank_;
  std::vector<MonotoneCubic> components_;
};

/// gamma_{r,s}(t) = r + (s - r) o base(t).
class AffinePath {
public:
  AffinePath(BasePath base, ValuePair vp);

  std::vector<double> point(double t) const;
  void point(double t, std::span<double> out) const;
  double velocity(Index i, double t) const;

  const BasePath& base() const { return base_; }
  const ValuePair& values() const { return vp_; }

private:
  BasePath base_;
  ValuePair vp_;
};

AffinePath affine_path(const BasePath& base, const ValuePair& vp);

using GradientFn = std::function<void(std::span<const double> x, std::span<double> grad)>;

/// Function known only through evaluation (and optionally its gradient).
struct BlackBoxFunction {
  std::size_t n = 0;
  Evaluator value;
  std::optional<GradientFn> gradient;
  /// Central differences use h_i = step_scale * (1 + |x_i|).
  double step_scale = 1e-6;
  /// Set if `value` must not be called concurrently.
  bool serial = true;

  void eval_gradient(std::span<const double> x, std::span<double> grad) const;
};

/// Wraps f with its exact symbolic gradient.
BlackBoxFunction as_black_box(const CharacteristicFunction& f);

AttributionResult attribute_path(const BlackBoxFunction& f, const ValuePair& vp,
                                 const BasePath& base, const QuadratureConfig& q = {});
AttributionResult attribute_path(const CharacteristicFunction& f, const ValuePair& vp,
                                 const BasePath& base, const QuadratureConfig& q = {});

AttributionResult attribute_aumann_shapley(const BlackBoxFunction& f, const ValuePair& vp,
                                           const QuadratureConfig& q = {});
AttributionResult attribute_aumann_shapley(const CharacteristicFunction& f,
                                           const ValuePair& vp,
                                           const QuadratureConfig& q = {});

/// Any attribution method over characteristic functions.
using AttributionMethod =
    std::function<AttributionResult(const CharacteristicFunction&, const ValuePair&)>;

/// Weighted sum of methods; weights must be >= 0 and sum to 1 within 1e-12.
AttributionMethod convex_combination(std::vector<std::pair<AttributionMethod, double>> methods);

/// Single-path method along one edge walk.
AttributionMethod edge_walk_method(Permutation rank, QuadratureConfig q = {});

}  // namespace attrib
