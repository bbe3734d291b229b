#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace attrib {

struct QuadratureConfig {
  /// Gauss-Legendre points per panel.
  int order = 16;
  /// Initial panel count per smooth piece.
  int panels = 8;
  /// Relative tolerance between successive panel doublings.
  double tol = 1e-10;
  int max_refine = 12;

  void validate() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on P_order, accurate to a few ulps; rules are cached.
const GaussLegendreRule& gauss_legendre(int order);

/// Composite rule with `panels` equal panels on [a, b] applied to a
/// vector-valued integrand; adds the result into `out`.
using VectorIntegrand = std::function<void(double t, std::span<double> values)>;

void integrate_composite(const VectorIntegrand& f, double a, double b, int order, int panels,
                         std::span<double> out);

struct AdaptiveResult {
  std::vector<double> values;
  bool converged = false;
  int panels_used = 0;
};

/// Integrates over each interval [breaks[k], breaks[k+1]] with panel doubling
/// until every component changes by at most tol * max_i |value_i| (all pieces
/// are refined together) or max_refine doublings were spent.
AdaptiveResult integrate_adaptive(const VectorIntegrand& f, std::size_t dim,
                                  std::span<const double> breaks, const QuadratureConfig& q);

/// Scalar convenience wrapper over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& q = {}, bool* converged = nullptr);

}  // namespace attrib
