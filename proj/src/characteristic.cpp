#include "attrib/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace attrib {

Subset canonical_subset(Subset indices, std::size_t n) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw std::invalid_argument("monomial repeats a variable; not multilinear");
  }
  if (!indices.empty() && indices.back() >= n) {
    throw DimensionError("monomial index " + std::to_string(indices.back()) +
                         " out of range for n = " + std::to_string(n));
  }
  return indices;
}

void MultilinearPoly::add_term(Subset indices, double coeff) {
  indices = canonical_subset(std::move(indices), n_);
  if (coeff == 0.0) {
    return;
  }
  auto [it, inserted] = terms_.try_emplace(std::move(indices), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) {
      terms_.erase(it);
    }
  }
}

double MultilinearPoly::coefficient(const Subset& indices) const {
  auto it = terms_.find(indices);
  return it == terms_.end() ? 0.0 : it->second;
}

double MultilinearPoly::evaluate(std::span<const double> x) const {
  if (x.size() != n_) {
    throw DimensionError("evaluate: expected " + std::to_string(n_) + " values, got " +
                         std::to_string(x.size()));
  }
  double sum = 0.0;
  for (const auto& [indices, coeff] : terms_) {
    double term = coeff;
    for (Index i : indices) {
      term *= x[i];
    }
    sum += term;
  }
  return sum;
}

bool MultilinearPoly::mentions(Index i) const {
  return std::any_of(terms_.begin(), terms_.end(), [i](const auto& kv) {
    return std::binary_search(kv.first.begin(), kv.first.end(), i);
  });
}

// ---------------------------------------------------------------------------
// Univariate registry

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// p(x) * (a x + b)
std::vector<double> multiply_linear(const std::vector<double>& p, double a, double b) {
  std::vector<double> out(p.size() + 1, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] += b * p[k];
    out[k + 1] += a * p[k];
  }
  return out;
}

}  // namespace

double evaluate(const UnivariateFn& fn, double x) {
  return std::visit(
      overloaded{
          [x](const PolynomialFn& p) {
            double acc = 0.0;
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
              acc = acc * x + *it;
            }
            return acc;
          },
          [x](const AffineFn& a) { return a.slope * x + a.intercept; },
          [x](const LogFn& l) {
            const double arg = l.slope * x + l.shift;
            if (!(arg > 0.0)) {
              throw DomainError("log term evaluated at non-positive argument " +
                                std::to_string(arg));
            }
            return l.scale * std::log(arg);
          },
          [x](const ExpFn& e) { return e.scale * std::exp(e.slope * x + e.shift); },
          [x](const PowerFn& p) {
            const double base = p.slope * x + p.shift;
            if (p.exponent < 0 && base == 0.0) {
              throw DomainError("negative power evaluated at zero base");
            }
            return p.scale * std::pow(base, p.exponent);
          },
      },
      fn);
}

UnivariateFn derivative(const UnivariateFn& fn) {
  return std::visit(
      overloaded{
          [](const PolynomialFn& p) -> UnivariateFn {
            PolynomialFn d;
            for (std::size_t k = 1; k < p.coeffs.size(); ++k) {
              d.coeffs.push_back(static_cast<double>(k) * p.coeffs[k]);
            }
            return d;
          },
          [](const AffineFn& a) -> UnivariateFn { return PolynomialFn{{a.slope}}; },
          [](const LogFn& l) -> UnivariateFn {
            return PowerFn{l.scale * l.slope, l.slope, l.shift, -1};
          },
          [](const ExpFn& e) -> UnivariateFn {
            return ExpFn{e.scale * e.slope, e.slope, e.shift};
          },
          [](const PowerFn& p) -> UnivariateFn {
            if (p.exponent == 0) {
              return PolynomialFn{};
            }
            return PowerFn{p.scale * p.exponent * p.slope, p.slope, p.shift,
                           p.exponent - 1};
          },
      },
      fn);
}

UnivariateFn compose_affine(const UnivariateFn& fn, double c, double d) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("affine reparameterization requires c > 0");
  }
  // (x - d) / c = a x + b
  const double a = 1.0 / c;
  const double b = -d / c;
  return std::visit(
      overloaded{
          [a, b](const PolynomialFn& p) -> UnivariateFn {
            std::vector<double> out(std::max<std::size_t>(p.coeffs.size(), 1), 0.0);
            std::vector<double> power{1.0};
            for (double coeff : p.coeffs) {
              for (std::size_t k = 0; k < power.size(); ++k) {
                out[k] += coeff * power[k];
              }
              power = multiply_linear(power, a, b);
            }
            return PolynomialFn{out};
          },
          [a, b](const AffineFn& f) -> UnivariateFn {
            return AffineFn{f.slope * a, f.slope * b + f.intercept};
          },
          [a, b](const LogFn& l) -> UnivariateFn {
            return LogFn{l.scale, l.slope * a, l.slope * b + l.shift};
          },
          [a, b](const ExpFn& e) -> UnivariateFn {
            return ExpFn{e.scale, e.slope * a, e.slope * b + e.shift};
          },
          [a, b](const PowerFn& p) -> UnivariateFn {
            return PowerFn{p.scale, p.slope * a, p.slope * b + p.shift, p.exponent};
          },
      },
      fn);
}

std::string kind_name(const UnivariateFn& fn) {
  return std::visit(overloaded{
                        [](const PolynomialFn&) { return std::string("poly"); },
                        [](const AffineFn&) { return std::string("affine"); },
                        [](const LogFn&) { return std::string("log"); },
                        [](const ExpFn&) { return std::string("exp"); },
                        [](const PowerFn&) { return std::string("pow"); },
                    },
                    fn);
}

// ---------------------------------------------------------------------------
// CharacteristicFunction

CharacteristicFunction::CharacteristicFunction(MultilinearPoly multilinear,
                                               std::vector<SeparableTerm> separable)
    : multilinear_(std::move(multilinear)), separable_(std::move(separable)) {
  for (const auto& term : separable_) {
    if (term.var >= n()) {
      throw DimensionError("separable term on variable " + std::to_string(term.var) +
                           " out of range for n = " + std::to_string(n()));
    }
  }
}

CharacteristicFunction& CharacteristicFunction::add_term(Subset indices, double coeff) {
  multilinear_.add_term(std::move(indices), coeff);
  return *this;
}

CharacteristicFunction& CharacteristicFunction::add_separable(Index var, UnivariateFn fn) {
  if (var >= n()) {
    throw DimensionError("separable term on variable " + std::to_string(var) +
                         " out of range for n = " + std::to_string(n()));
  }
  separable_.push_back({var, std::move(fn)});
  return *this;
}

double CharacteristicFunction::evaluate(std::span<const double> x) const {
  double value = multilinear_.evaluate(x);
  for (const auto& term : separable_) {
    value += term.evaluate(x[term.var]);
  }
  return value;
}

double CharacteristicFunction::separable_value(Index i, double xi) const {
  double value = 0.0;
  for (const auto& term : separable_) {
    if (term.var == i) {
      value += term.evaluate(xi);
    }
  }
  return value;
}

bool CharacteristicFunction::mentions(Index i) const {
  return multilinear_.mentions(i) ||
         std::any_of(separable_.begin(), separable_.end(),
                     [i](const SeparableTerm& t) { return t.var == i; });
}

CharacteristicFunction partial_derivative(const CharacteristicFunction& f, Index i) {
  if (i >= f.n()) {
    throw DimensionError("partial_derivative: index " + std::to_string(i) +
                         " out of range for n = " + std::to_string(f.n()));
  }
  CharacteristicFunction d(f.n());
  for (const auto& [indices, coeff] : f.multilinear().terms()) {
    auto pos = std::lower_bound(indices.begin(), indices.end(), i);
    if (pos == indices.end() || *pos != i) {
      continue;
    }
    Subset rest(indices.begin(), pos);
    rest.insert(rest.end(), pos + 1, indices.end());
    d.add_term(std::move(rest), coeff);
  }
  for (const auto& term : f.separable()) {
    if (term.var == i) {
      d.add_separable(i, derivative(term.fn));
    }
  }
  return d;
}

CharacteristicFunction combine(const CharacteristicFunction& f1,
                               const CharacteristicFunction& f2, double a, double b) {
  if (f1.n() != f2.n()) {
    throw DimensionError("combine: dimension mismatch " + std::to_string(f1.n()) +
                         " vs " + std::to_string(f2.n()));
  }
  CharacteristicFunction out(f1.n());
  for (const auto& [indices, coeff] : f1.multilinear().terms()) {
    out.add_term(indices, a * coeff);
  }
  for (const auto& [indices, coeff] : f2.multilinear().terms()) {
    out.add_term(indices, b * coeff);
  }
  // Separable terms are scaled through a constant-factor wrapper so every kind
  // stays in the registry.
  auto scaled = [](const UnivariateFn& fn, double k) -> UnivariateFn {
    return std::visit(
        overloaded{
            [k](PolynomialFn p) -> UnivariateFn {
              for (double& c : p.coeffs) c *= k;
              return p;
            },
            [k](AffineFn f) -> UnivariateFn { return AffineFn{k * f.slope, k * f.intercept}; },
            [k](LogFn l) -> UnivariateFn { l.scale *= k; return l; },
            [k](ExpFn e) -> UnivariateFn { e.scale *= k; return e; },
            [k](PowerFn p) -> UnivariateFn { p.scale *= k; return p; },
        },
        fn);
  };
  if (a != 0.0) {
    for (const auto& term : f1.separable()) {
      out.add_separable(term.var, scaled(term.fn, a));
    }
  }
  if (b != 0.0) {
    for (const auto& term : f2.separable()) {
      out.add_separable(term.var, scaled(term.fn, b));
    }
  }
  return out;
}

void require_valid_permutation(std::span<const Index> sigma, std::size_t n) {
  if (sigma.size() != n) {
    throw std::invalid_argument("permutation has length " + std::to_string(sigma.size()) +
                                ", expected " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (Index v : sigma) {
    if (v >= n || seen[v]) {
      throw std::invalid_argument("not a permutation of 0..n-1");
    }
    seen[v] = true;
  }
}

CharacteristicFunction permute_variables(const CharacteristicFunction& f,
                                         std::span<const Index> sigma) {
  require_valid_permutation(sigma, f.n());
  CharacteristicFunction out(f.n());
  for (const auto& [indices, coeff] : f.multilinear().terms()) {
    Subset mapped;
    mapped.reserve(indices.size());
    for (Index i : indices) {
      mapped.push_back(sigma[i]);
    }
    out.add_term(std::move(mapped), coeff);
  }
  for (const auto& term : f.separable()) {
    out.add_separable(sigma[term.var], term.fn);
  }
  return out;
}

CharacteristicFunction affine_reparameterize(const CharacteristicFunction& f, Index j,
                                             double c, double d) {
  if (j >= f.n()) {
    throw DimensionError("affine_reparameterize: index out of range");
  }
  if (!(c > 0.0)) {
    throw std::invalid_argument("affine reparameterization requires c > 0");
  }
  CharacteristicFunction out(f.n());
  for (const auto& [indices, coeff] : f.multilinear().terms()) {
    if (!std::binary_search(indices.begin(), indices.end(), j)) {
      out.add_term(indices, coeff);
      continue;
    }
    // coeff * x_rest * (x_j - d) / c
    out.add_term(indices, coeff / c);
    if (d != 0.0) {
      Subset rest;
      std::copy_if(indices.begin(), indices.end(), std::back_inserter(rest),
                   [j](Index i) { return i != j; });
      out.add_term(std::move(rest), -coeff * d / c);
    }
  }
  for (const auto& term : f.separable()) {
    out.add_separable(term.var, term.var == j ? compose_affine(term.fn, c, d) : term.fn);
  }
  return out;
}

// ---------------------------------------------------------------------------

ValuePair::ValuePair(std::vector<double> initial, std::vector<double> final_values)
    : r(std::move(initial)), s(std::move(final_values)) {
  if (r.size() != s.size()) {
    throw DimensionError("value pair: initial has " + std::to_string(r.size()) +
                         " entries, final has " + std::to_string(s.size()));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(r.begin(), r.end(), finite) || !std::all_of(s.begin(), s.end(), finite)) {
    throw DomainError("value pair contains a non-finite entry");
  }
}

double AttributionResult::total() const {
  return std::accumulate(z.begin(), z.end(), 0.0);
}

void attach_residual(AttributionResult& result, double f_r, double f_s) {
  result.residual = result.total() - (f_s - f_r);
}

std::string to_string(const CharacteristicFunction& f) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [indices, coeff] : f.multilinear().terms()) {
    out << (first ? "" : " + ") << coeff;
    for (Index i : indices) {
      out << "*x" << i;
    }
    first = false;
  }
  for (const auto& term : f.separable()) {
    out << (first ? "" : " + ") << kind_name(term.fn) << "(x" << term.var << ")";
    first = false;
  }
  return first ? "0" : out.str();
}

}  // namespace attrib
