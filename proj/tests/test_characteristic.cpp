#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "attrib/characteristic.hpp"

using namespace attrib;

namespace {

CharacteristicFunction product(std::size_t n, Subset vars, double coeff = 1.0) {
  CharacteristicFunction f(n);
  f.add_term(std::move(vars), coeff);
  return f;
}

CharacteristicFunction random_function(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> coeff(-5.0, 5.0);
  std::bernoulli_distribution take(0.5);
  CharacteristicFunction f(n);
  for (int t = 0; t < 6; ++t) {
    Subset s;
    for (Index i = 0; i < n; ++i) {
      if (take(rng)) s.push_back(i);
    }
    f.add_term(s, coeff(rng));
  }
  f.add_separable(0, PolynomialFn{{coeff(rng), coeff(rng), coeff(rng)}});
  f.add_separable(n - 1, ExpFn{coeff(rng), 0.3, 0.1});
  f.add_separable(n / 2, LogFn{coeff(rng), 1.0, 10.0});
  return f;
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> x(-4.0, 4.0);
  std::vector<double> p(n);
  for (double& v : p) v = x(rng);
  return p;
}

}  // namespace

TEST_CASE("evaluate: single monomial, procurement endpoints, log term") {
  CHECK(product(2, {0, 1}).evaluate(std::vector{3.0, 4.0}) == 12.0);

  const auto apc = product(3, {0, 1, 2});
  CHECK(apc.evaluate(std::vector{4.0, 1.0, 1.0}) == 4.0);
  CHECK(apc.evaluate(std::vector{5.0, 12.0, 1.5}) == 90.0);

  auto f = product(2, {0, 1});
  f.add_separable(0, LogFn{});
  CHECK(f.evaluate(std::vector{1.0, 5.0}) == 5.0);
}

TEST_CASE("evaluate: errors") {
  const auto f = product(2, {0, 1});
  CHECK_THROWS_AS(f.evaluate(std::vector{1.0}), DimensionError);

  auto g = CharacteristicFunction(1);
  g.add_separable(0, LogFn{});
  CHECK_THROWS_AS(g.evaluate(std::vector{0.0}), DomainError);
  CHECK_THROWS_AS(g.evaluate(std::vector{-2.0}), DomainError);
}

TEST_CASE("multilinear representation invariants") {
  MultilinearPoly p(3);
  p.add_term({2, 0}, 1.5);
  CHECK(p.coefficient({0, 2}) == 1.5);
  p.add_term({0, 2}, -1.5);
  CHECK(p.term_count() == 0);
  CHECK_THROWS(p.add_term({1, 1}, 1.0));
  CHECK_THROWS_AS(p.add_term({3}, 1.0), DimensionError);
  p.add_term({1}, 0.0);
  CHECK(p.term_count() == 0);
}

TEST_CASE("partial_derivative") {
  SUBCASE("monomial drops the variable") {
    const auto d = partial_derivative(product(3, {0, 1, 2}), 0);
    CHECK(d.multilinear().terms().size() == 1);
    CHECK(d.multilinear().coefficient({1, 2}) == 1.0);
  }
  SUBCASE("constant monomial appears") {
    auto f = product(2, {0, 1});
    f.add_term({1}, 5.0);
    const auto d = partial_derivative(f, 1);
    CHECK(d.multilinear().coefficient({0}) == 1.0);
    CHECK(d.multilinear().coefficient({}) == 5.0);
    CHECK(d.multilinear().term_count() == 2);
  }
  SUBCASE("dummy variable") {
    const auto d = partial_derivative(product(3, {0, 1}), 2);
    CHECK(d.multilinear().term_count() == 0);
    CHECK(d.separable().empty());
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(partial_derivative(product(2, {0, 1}), 2), DimensionError);
  }
  SUBCASE("separable kinds differentiate exactly") {
    const UnivariateFn kinds[] = {PolynomialFn{{1.0, -2.0, 0.5, 3.0}}, AffineFn{2.5, -1.0},
                                  LogFn{1.5, 2.0, 3.0}, ExpFn{-0.7, 0.4, 0.2},
                                  PowerFn{2.0, 1.5, 4.0, -2}};
    for (const auto& fn : kinds) {
      const auto d = derivative(fn);
      for (double x : {0.3, 1.1, 2.0}) {
        const double h = 1e-5;
        const double numeric = (evaluate(fn, x + h) - evaluate(fn, x - h)) / (2 * h);
        CHECK(evaluate(d, x) == doctest::Approx(numeric).epsilon(1e-7));
      }
    }
  }
  SUBCASE("second derivative of the multilinear part vanishes") {
    std::mt19937_64 rng(11);
    const auto f = random_function(rng, 5);
    for (Index i = 0; i < 5; ++i) {
      const auto dd = partial_derivative(partial_derivative(f, i), i);
      CHECK(dd.multilinear().term_count() == 0);
    }
  }
}

TEST_CASE("combine") {
  const auto x01 = product(2, {0, 1});
  CHECK(combine(x01, x01, 1.0, -1.0).multilinear().term_count() == 0);

  const auto sum = combine(x01, product(2, {0}), 1.0, 1.0);
  CHECK(sum.multilinear().coefficient({0, 1}) == 1.0);
  CHECK(sum.multilinear().coefficient({0}) == 1.0);

  const auto mixed = combine(product(3, {0, 1, 2}), product(3, {1, 2}), 2.0, 3.0);
  CHECK(mixed.evaluate(std::vector{1.0, 1.0, 1.0}) == 5.0);

  CHECK_THROWS_AS(combine(product(2, {0}), product(3, {0}), 1.0, 1.0), DimensionError);
}

TEST_CASE("combine is linear under evaluation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> scalar(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f1 = random_function(rng, 4);
    const auto f2 = random_function(rng, 4);
    const double a = scalar(rng);
    const double b = scalar(rng);
    const auto x = random_point(rng, 4);
    const double expected = a * f1.evaluate(x) + b * f2.evaluate(x);
    const double got = combine(f1, f2, a, b).evaluate(x);
    CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("permute_variables") {
  SUBCASE("transposition of a linear function") {
    CharacteristicFunction f(2);
    f.add_term({0}, 1.0).add_term({1}, 2.0);
    const Index swap[] = {1, 0};
    const auto g = permute_variables(f, swap);
    CHECK(g.multilinear().coefficient({1}) == 1.0);
    CHECK(g.multilinear().coefficient({0}) == 2.0);
  }
  SUBCASE("symmetric monomial is fixed") {
    const auto f = product(3, {0, 1, 2});
    const Index cycle[] = {2, 0, 1};
    CHECK(permute_variables(f, cycle) == f);
  }
  SUBCASE("three-cycle relabels indices") {
    // 1 -> 2, 2 -> 3, 3 -> 1 in 1-based terms.
    const auto f = product(3, {0, 2}, 5.0);
    const Index sigma[] = {1, 2, 0};
    const auto g = permute_variables(f, sigma);
    CHECK(g.multilinear().coefficient({0, 1}) == 5.0);
    std::mt19937_64 rng(3);
    const auto y = random_point(rng, 3);
    // g(y) = f(y_sigma(0), y_sigma(1), y_sigma(2))
    const std::vector<double> pulled{y[1], y[2], y[0]};
    CHECK(g.evaluate(y) == doctest::Approx(f.evaluate(pulled)).epsilon(1e-15));
  }
  SUBCASE("invalid permutation") {
    const Index bad[] = {0, 0, 1};
    CHECK_THROWS(permute_variables(product(3, {0}), bad));
    const Index short_perm[] = {0, 1};
    CHECK_THROWS(permute_variables(product(3, {0}), short_perm));
  }
}

TEST_CASE("permutation consistency on random functions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_function(rng, 5);
    std::vector<Index> sigma{0, 1, 2, 3, 4};
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const auto g = permute_variables(f, sigma);
    const auto y = random_point(rng, 5);
    std::vector<double> pulled(5);
    for (Index i = 0; i < 5; ++i) pulled[i] = y[sigma[i]];
    const double a = g.evaluate(y);
    const double b = f.evaluate(pulled);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("affine_reparameterize") {
  SUBCASE("pure scaling") {
    const auto g = affine_reparameterize(product(2, {0, 1}), 0, 2.0, 0.0);
    CHECK(g.multilinear().coefficient({0, 1}) == 0.5);
    CHECK(g.multilinear().term_count() == 1);
  }
  SUBCASE("scaling with shift expands the monomial") {
    const auto g = affine_reparameterize(product(2, {0, 1}), 0, 2.0, 1.0);
    CHECK(g.multilinear().coefficient({0, 1}) == 0.5);
    CHECK(g.multilinear().coefficient({1}) == -0.5);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 3; ++k) {
      const auto x = random_point(rng, 2);
      CHECK(g.evaluate(x) == doctest::Approx((x[0] - 1.0) / 2.0 * x[1]));
    }
  }
  SUBCASE("shift only") {
    const auto g = affine_reparameterize(product(1, {0}), 0, 1.0, 5.0);
    CHECK(g.multilinear().coefficient({0}) == 1.0);
    CHECK(g.multilinear().coefficient({}) == -5.0);
  }
  SUBCASE("c must be positive") {
    CHECK_THROWS(affine_reparameterize(product(1, {0}), 0, 0.0, 1.0));
    CHECK_THROWS(affine_reparameterize(product(1, {0}), 0, -2.0, 1.0));
  }
}

TEST_CASE("reparameterization consistency on random functions") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> cdist(0.2, 5.0);
  std::uniform_real_distribution<double> ddist(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_function(rng, 4);
    const Index j = trial % 4;
    const double c = cdist(rng);
    const double d = ddist(rng);
    const auto g = affine_reparameterize(f, j, c, d);
    auto y = random_point(rng, 4);
    const double expected = f.evaluate(y);
    y[j] = c * y[j] + d;
    const double got = g.evaluate(y);
    CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("value pair validation") {
  CHECK_THROWS_AS(ValuePair({1.0, 2.0}, {1.0}), DimensionError);
  CHECK_THROWS_AS(ValuePair({1.0}, {std::nan("")}), DomainError);
  CHECK_THROWS_AS(ValuePair({INFINITY}, {1.0}), DomainError);
}
