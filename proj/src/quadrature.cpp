#include "attrib/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace attrib {

void QuadratureConfig::validate() const {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  if (panels < 1) throw std::invalid_argument("quadrature panels must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tol must be > 0");
  if (max_refine < 0) throw std::invalid_argument("max_refine must be >= 0");
}

namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, build_rule(order)).first;
  }
  return it->second;
}

void integrate_composite(const VectorIntegrand& f, double a, double b, int order, int panels,
                         std::span<double> out) {
  const GaussLegendreRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  std::vector<double> values(out.size());
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      std::fill(values.begin(), values.end(), 0.0);
      f(mid + half * rule.nodes[k], values);
      const double w = half * rule.weights[k];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * values[i];
    }
  }
}

AdaptiveResult integrate_adaptive(const VectorIntegrand& f, std::size_t dim,
                                  std::span<const double> breaks, const QuadratureConfig& q) {
  q.validate();
  if (breaks.size() < 2) throw std::invalid_argument("need at least one interval");

  auto estimate = [&](int panels) {
    std::vector<double> total(dim, 0.0);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      if (breaks[k + 1] > breaks[k]) {
        integrate_composite(f, breaks[k], breaks[k + 1], q.order, panels, total);
      }
    }
    return total;
  };

  AdaptiveResult result;
  int panels = q.panels;
  result.values = estimate(panels);
  for (int level = 0; level < q.max_refine; ++level) {
    panels *= 2;
    std::vector<double> refined = estimate(panels);
    double scale = 0.0;
    double change = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      scale = std::max(scale, std::abs(refined[i]));
      change = std::max(change, std::abs(refined[i] - result.values[i]));
    }
    result.values = std::move(refined);
    result.panels_used = panels;
    if (change <= q.tol * scale || change == 0.0) {
      result.converged = true;
      return result;
    }
  }
  result.panels_used = panels;
  return result;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& q, bool* converged) {
  const double breaks[] = {a, b};
  auto result = integrate_adaptive([&f](double t, std::span<double> v) { v[0] = f(t); }, 1,
                                   breaks, q);
  if (converged) *converged = result.converged;
  return result.values[0];
}

}  // namespace attrib
