#pragma once

// Characteristic functions of the form
//
//   f(x) = sum_I c_I prod_{i in I} x_i  +  sum_i f_i(x_i)
//
// i.e. a sparse multilinear polynomial plus additively separable univariate
// terms drawn from a small closed registry of kinds.  Every kind has an exact
// symbolic derivative and is closed under affine substitution x -> (x - d)/c,
// so partial derivatives and affine reparameterizations stay inside the type.
//
// Variable indices are 0-based throughout the library.

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace attrib {

using Index = std::size_t;

/// Sorted, duplicate-free list of variable indices.
using Subset = std::vector<Index>;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Sorts and checks a subset; throws on duplicates or indices >= n.
Subset canonical_subset(Subset indices, std::size_t n);

class MultilinearPoly {
public:
  using TermMap = std::map<Subset, double>;

  MultilinearPoly() = default;
  explicit MultilinearPoly(std::size_t n) : n_(n) {}

  std::size_t n() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  /// Adds coeff * x_I, merging with an existing term.  Terms whose merged
  /// coefficient is exactly 0.0 are removed.
  void add_term(Subset indices, double coeff);

  double coefficient(const Subset& indices) const;
  double evaluate(std::span<const double> x) const;

  bool mentions(Index i) const;

  friend bool operator==(const MultilinearPoly&, const MultilinearPoly&) = default;

private:
  std::size_t n_ = 0;
  TermMap terms_;
};

// Separable kinds.  All are parameterised so that composing with an affine
// map of the argument yields a term of the same kind.

/// sum_k coeffs[k] * x^k
struct PolynomialFn {
  std::vector<double> coeffs;
  friend bool operator==(const PolynomialFn&, const PolynomialFn&) = default;
};

/// slope * x + intercept
struct AffineFn {
  double slope = 0.0;
  double intercept = 0.0;
  friend bool operator==(const AffineFn&, const AffineFn&) = default;
};

/// scale * ln(slope * x + shift); argument must be positive.
struct LogFn {
  double scale = 1.0;
  double slope = 1.0;
  double shift = 0.0;
  friend bool operator==(const LogFn&, const LogFn&) = default;
};

/// scale * exp(slope * x + shift)
struct ExpFn {
  double scale = 1.0;
  double slope = 1.0;
  double shift = 0.0;
  friend bool operator==(const ExpFn&, const ExpFn&) = default;
};

/// scale * (slope * x + shift)^exponent.  Closes the registry under
/// differentiation of LogFn (exponent -1).
struct PowerFn {
  double scale = 1.0;
  double slope = 1.0;
  double shift = 0.0;
  int exponent = 1;
  friend bool operator==(const PowerFn&, const PowerFn&) = default;
};

using UnivariateFn = std::variant<PolynomialFn, AffineFn, LogFn, ExpFn, PowerFn>;

double evaluate(const UnivariateFn& fn, double x);
UnivariateFn derivative(const UnivariateFn& fn);
/// Returns g(x) = fn((x - d) / c).
UnivariateFn compose_affine(const UnivariateFn& fn, double c, double d);
std::string kind_name(const UnivariateFn& fn);

struct SeparableTerm {
  Index var = 0;
  UnivariateFn fn;

  double evaluate(double x) const { return attrib::evaluate(fn, x); }
  friend bool operator==(const SeparableTerm&, const SeparableTerm&) = default;
};

class CharacteristicFunction {
public:
  CharacteristicFunction() = default;
  explicit CharacteristicFunction(std::size_t n) : multilinear_(n) {}
  CharacteristicFunction(MultilinearPoly multilinear, std::vector<SeparableTerm> separable);

  std::size_t n() const { return multilinear_.n(); }
  const MultilinearPoly& multilinear() const { return multilinear_; }
  const std::vector<SeparableTerm>& separable() const { return separable_; }

  CharacteristicFunction& add_term(Subset indices, double coeff);
  CharacteristicFunction& add_separable(Index var, UnivariateFn fn);

  double evaluate(std::span<const double> x) const;

  /// Sum of the separable terms attached to variable i, at x_i.
  double separable_value(Index i, double xi) const;

  /// True if some stored monomial or separable term mentions i.
  bool mentions(Index i) const;
  bool is_multilinear() const { return separable_.empty(); }

  friend bool operator==(const CharacteristicFunction&,
                         const CharacteristicFunction&) = default;

private:
  MultilinearPoly multilinear_;
  std::vector<SeparableTerm> separable_;
};

CharacteristicFunction partial_derivative(const CharacteristicFunction& f, Index i);

/// a * f1 + b * f2
CharacteristicFunction combine(const CharacteristicFunction& f1,
                               const CharacteristicFunction& f2, double a, double b);

/// Renames variable i to sigma[i]: every monomial x_I becomes x_{sigma(I)}
/// and every separable term on i moves to sigma[i].  Equivalently
/// result(y) = f(y_{sigma[0]}, ..., y_{sigma[n-1]}).
CharacteristicFunction permute_variables(const CharacteristicFunction& f,
                                         std::span<const Index> sigma);

/// Returns g(x) = f(x_0, ..., (x_j - d) / c, ..., x_{n-1}); requires c > 0.
CharacteristicFunction affine_reparameterize(const CharacteristicFunction& f, Index j,
                                             double c, double d);

/// Initial and final values of the variables.
struct ValuePair {
  std::vector<double> r;
  std::vector<double> s;

  ValuePair() = default;
  ValuePair(std::vector<double> initial, std::vector<double> final_values);

  std::size_t n() const { return r.size(); }
  double delta(Index i) const { return s[i] - r[i]; }
};

struct AttributionResult {
  std::string method;
  std::vector<double> z;
  /// sum(z) - (f(s) - f(r))
  double residual = 0.0;
  /// False only for numeric methods that hit their refinement limit.
  bool converged = true;

  double total() const;
};

/// Fills residual from f(s) - f(r).
void attach_residual(AttributionResult& result, double f_r, double f_s);

void require_valid_permutation(std::span<const Index> sigma, std::size_t n);

std::string to_string(const CharacteristicFunction& f);

}  // namespace attrib
