#include "attrib/path.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace attrib {

// ---------------------------------------------------------------------------
// MonotoneCubic (Fritsch-Butland slopes, as in PCHIP)

MonotoneCubic::MonotoneCubic(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t m = knots_.size();
  if (m < 2 || values_.size() != m) {
    throw std::invalid_argument("monotone cubic needs >= 2 knots and matching values");
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (!(knots_[k + 1] > knots_[k])) {
      throw std::invalid_argument("path knots must be strictly increasing");
    }
    if (values_[k + 1] < values_[k]) {
      throw std::invalid_argument("path samples must be non-decreasing");
    }
  }
  std::vector<double> h(m - 1);
  std::vector<double> delta(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    h[k] = knots_[k + 1] - knots_[k];
    delta[k] = (values_[k + 1] - values_[k]) / h[k];
  }
  slopes_.assign(m, 0.0);
  slopes_[0] = delta[0];
  slopes_[m - 1] = delta[m - 2];
  for (std::size_t k = 1; k + 1 < m; ++k) {
    if (delta[k - 1] > 0.0 && delta[k] > 0.0) {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      slopes_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
}

std::size_t MonotoneCubic::segment(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t k = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(k, knots_.size() - 2);
}

double MonotoneCubic::value(double t) const {
  const std::size_t k = segment(t);
  const double h = knots_[k + 1] - knots_[k];
  const double u = std::clamp((t - knots_[k]) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] +
         h11 * h * slopes_[k + 1];
}

double MonotoneCubic::derivative(double t) const {
  const std::size_t k = segment(t);
  const double h = knots_[k + 1] - knots_[k];
  const double u = std::clamp((t - knots_[k]) / h, 0.0, 1.0);
  const double d00 = 6 * u * u - 6 * u;
  const double d10 = 3 * u * u - 4 * u + 1;
  const double d01 = -d00;
  const double d11 = 3 * u * u - 2 * u;
  return (d00 * values_[k] + d01 * values_[k + 1]) / h + d10 * slopes_[k] +
         d11 * slopes_[k + 1];
}

// ---------------------------------------------------------------------------
// BasePath

BasePath BasePath::straight_line(std::size_t n) { return BasePath(Kind::StraightLine, n); }

BasePath BasePath::edge_walk(Permutation rank) {
  require_valid_permutation(rank, rank.size());
  BasePath path(Kind::EdgeWalk, rank.size());
  path.rank_ = std::move(rank);
  return path;
}

BasePath BasePath::tabulated(std::vector<double> knots,
                             const std::vector<std::vector<double>>& samples) {
  if (knots.empty() || knots.front() != 0.0 || knots.back() != 1.0) {
    throw std::invalid_argument("tabulated path knots must run from 0 to 1");
  }
  BasePath path(Kind::Tabulated, samples.size());
  for (const auto& row : samples) {
    if (row.size() != knots.size() || row.front() != 0.0 || row.back() != 1.0) {
      throw std::invalid_argument(
          "each tabulated component must start at 0, end at 1, and match the knots");
    }
    path.components_.emplace_back(knots, row);
  }
  return path;
}

double BasePath::component(Index i, double t) const {
  switch (kind_) {
    case Kind::StraightLine:
      return t;
    case Kind::EdgeWalk:
      return std::clamp(t * static_cast<double>(n_) - static_cast<double>(rank_[i]), 0.0, 1.0);
    case Kind::Tabulated:
      return components_[i].value(t);
  }
  return 0.0;
}

double BasePath::component_derivative(Index i, double t) const {
  switch (kind_) {
    case Kind::StraightLine:
      return 1.0;
    case Kind::EdgeWalk: {
      const double local = t * static_cast<double>(n_) - static_cast<double>(rank_[i]);
      return (local >= 0.0 && local < 1.0) ? static_cast<double>(n_) : 0.0;
    }
    case Kind::Tabulated:
      return components_[i].derivative(t);
  }
  return 0.0;
}

std::vector<double> BasePath::breakpoints() const {
  std::vector<double> breaks{0.0, 1.0};
  if (kind_ == Kind::EdgeWalk) {
    for (std::size_t k = 1; k < n_; ++k) {
      breaks.push_back(static_cast<double>(k) / static_cast<double>(n_));
    }
  } else if (kind_ == Kind::Tabulated) {
    for (const auto& c : components_) {
      breaks.insert(breaks.end(), c.knots().begin(), c.knots().end());
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

// ---------------------------------------------------------------------------

AffinePath::AffinePath(BasePath base, ValuePair vp) : base_(std::move(base)), vp_(std::move(vp)) {
  if (base_.n() != vp_.n()) {
    throw DimensionError("path has " + std::to_string(base_.n()) +
                         " components but values have " + std::to_string(vp_.n()));
  }
}

std::vector<double> AffinePath::point(double t) const {
  std::vector<double> x(vp_.n());
  point(t, x);
  return x;
}

void AffinePath::point(double t, std::span<double> out) const {
  for (Index i = 0; i < vp_.n(); ++i) {
    out[i] = vp_.r[i] + vp_.delta(i) * base_.component(i, t);
  }
}

double AffinePath::velocity(Index i, double t) const {
  return vp_.delta(i) * base_.component_derivative(i, t);
}

AffinePath affine_path(const BasePath& base, const ValuePair& vp) { return {base, vp}; }

// ---------------------------------------------------------------------------

void BlackBoxFunction::eval_gradient(std::span<const double> x, std::span<double> grad) const {
  if (gradient) {
    (*gradient)(x, grad);
    return;
  }
  std::vector<double> probe(x.begin(), x.end());
  for (Index i = 0; i < n; ++i) {
    const double h = step_scale * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = value(probe);
    probe[i] = x[i] - h;
    const double down = value(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
}

BlackBoxFunction as_black_box(const CharacteristicFunction& f) {
  auto partials = std::make_shared<std::vector<CharacteristicFunction>>();
  for (Index i = 0; i < f.n(); ++i) {
    partials->push_back(partial_derivative(f, i));
  }
  BlackBoxFunction box;
  box.n = f.n();
  box.value = evaluator_of(f);
  box.gradient = [partials](std::span<const double> x, std::span<double> grad) {
    for (std::size_t i = 0; i < partials->size(); ++i) {
      grad[i] = (*partials)[i].evaluate(x);
    }
  };
  box.serial = false;
  return box;
}

AttributionResult attribute_path(const BlackBoxFunction& f, const ValuePair& vp,
                                 const BasePath& base, const QuadratureConfig& q) {
  if (f.n != vp.n()) {
    throw DimensionError("function has " + std::to_string(f.n) +
                         " variables but values have " + std::to_string(vp.n()));
  }
  const AffinePath path(base, vp);
  const std::size_t n = vp.n();
  std::vector<double> x(n);
  std::vector<double> grad(n);
  auto integrand = [&](double t, std::span<double> out) {
    path.point(t, x);
    f.eval_gradient(x, grad);
    for (Index i = 0; i < n; ++i) {
      const double v = path.velocity(i, t);
      out[i] = v == 0.0 ? 0.0 : grad[i] * v;
    }
  };
  const auto breaks = base.breakpoints();
  AdaptiveResult integral = integrate_adaptive(integrand, n, breaks, q);

  AttributionResult result;
  switch (base.kind()) {
    case BasePath::Kind::StraightLine: result.method = "as-numeric"; break;
    case BasePath::Kind::EdgeWalk: result.method = "edge-walk"; break;
    case BasePath::Kind::Tabulated: result.method = "path-numeric"; break;
  }
  result.z = std::move(integral.values);
  result.converged = integral.converged;
  attach_residual(result, f.value(vp.r), f.value(vp.s));
  return result;
}

AttributionResult attribute_path(const CharacteristicFunction& f, const ValuePair& vp,
                                 const BasePath& base, const QuadratureConfig& q) {
  return attribute_path(as_black_box(f), vp, base, q);
}

AttributionResult attribute_aumann_shapley(const BlackBoxFunction& f, const ValuePair& vp,
                                           const QuadratureConfig& q) {
  return attribute_path(f, vp, BasePath::straight_line(vp.n()), q);
}

AttributionResult attribute_aumann_shapley(const CharacteristicFunction& f,
                                           const ValuePair& vp, const QuadratureConfig& q) {
  return attribute_path(f, vp, BasePath::straight_line(vp.n()), q);
}

AttributionMethod convex_combination(std::vector<std::pair<AttributionMethod, double>> methods) {
  if (methods.empty()) {
    throw std::invalid_argument("convex combination of no methods");
  }
  double sum = 0.0;
  for (const auto& [method, w] : methods) {
    if (!(w >= 0.0)) throw std::invalid_argument("convex weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("convex weights sum to " + std::to_string(sum));
  }
  return [methods = std::move(methods)](const CharacteristicFunction& f, const ValuePair& vp) {
    AttributionResult combined;
    combined.method = "convex";
    combined.z.assign(vp.n(), 0.0);
    for (const auto& [method, w] : methods) {
      const AttributionResult part = method(f, vp);
      for (Index i = 0; i < vp.n(); ++i) combined.z[i] += w * part.z[i];
      combined.converged = combined.converged && part.converged;
    }
    attach_residual(combined, f.evaluate(vp.r), f.evaluate(vp.s));
    return combined;
  };
}

AttributionMethod edge_walk_method(Permutation rank, QuadratureConfig q) {
  BasePath base = BasePath::edge_walk(std::move(rank));
  return [base = std::move(base), q](const CharacteristicFunction& f, const ValuePair& vp) {
    return attribute_path(f, vp, base, q);
  };
}

}  // namespace attrib
