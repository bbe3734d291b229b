#include <doctest.h>

#include <cmath>
#include <numeric>

#include "attrib/axioms.hpp"
#include "attrib/exact.hpp"
#include "attrib/oracle.hpp"
#include "support.hpp"

using namespace attrib;
using attrib::testing::rel_gap;

namespace {

CharacteristicFunction x0x1() {
  CharacteristicFunction f(2);
  f.add_term({0, 1}, 1.0);
  return f;
}

const ValuePair kUnit2({0.0, 0.0}, {1.0, 1.0});

double square_times(std::span<const double> x) { return x[0] * x[0] * x[1]; }

}  // namespace

TEST_CASE("vertex_value") {
  const ValuePair vp({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  CHECK(vertex_value(vp, {}) == std::vector{1.0, 2.0, 3.0});
  const Index one[] = {1};
  CHECK(vertex_value(vp, one) == std::vector{1.0, 5.0, 3.0});
  const Index all[] = {0, 1, 2};
  CHECK(vertex_value(vp, all) == std::vector{4.0, 5.0, 6.0});
}

TEST_CASE("shapley-shubik brute force") {
  const auto unit = shapley_shubik_bruteforce(x0x1(), kUnit2);
  CHECK(unit.z[0] == doctest::Approx(0.5));
  CHECK(unit.z[1] == doctest::Approx(0.5));
  CHECK(unit.method == "ss-brute");

  CharacteristicFunction apc(3);
  apc.add_term({0, 1, 2}, 1.0);
  const auto intro = shapley_shubik_bruteforce(apc, ValuePair({4.0, 1.0, 1.0}, {5.0, 12.0, 1.5}));
  CHECK(intro.z[0] == doctest::Approx(51.5 / 6).epsilon(1e-14));
  CHECK(intro.z[1] == doctest::Approx(374.0 / 6).epsilon(1e-14));
  CHECK(intro.z[2] == doctest::Approx(90.5 / 6).epsilon(1e-14));

  const auto sq = shapley_shubik_bruteforce(Evaluator(square_times), kUnit2);
  CHECK(sq.z[0] == doctest::Approx(0.5));
  CHECK(sq.z[1] == doctest::Approx(0.5));

  CharacteristicFunction big(kOracleMaxVars + 1);
  CHECK_THROWS(shapley_shubik_bruteforce(big, ValuePair(std::vector<double>(kOracleMaxVars + 1, 0.0),
                                                        std::vector<double>(kOracleMaxVars + 1, 1.0))));
}

TEST_CASE("random-order attribution") {
  const auto identity =
      random_order_attribution(x0x1(), kUnit2, PermutationWeights::single({0, 1}));
  CHECK(identity.z[0] == 0.0);
  CHECK(identity.z[1] == 1.0);

  const auto uniform = random_order_attribution(x0x1(), kUnit2, PermutationWeights::uniform(2));
  CHECK(uniform.z[0] == doctest::Approx(0.5));
  CHECK(uniform.z[1] == doctest::Approx(0.5));

  CharacteristicFunction linear(3);
  linear.add_term({0}, 2.0).add_term({1}, -1.0).add_term({2}, 4.0);
  const ValuePair vp({1.0, 1.0, 1.0}, {2.0, 3.0, 0.5});
  PermutationWeights w(3);
  w.add({2, 0, 1}, 0.3).add({1, 2, 0}, 0.7);
  const auto lin = random_order_attribution(linear, vp, w);
  CHECK(lin.z[0] == doctest::Approx(2.0));
  CHECK(lin.z[1] == doctest::Approx(-2.0));
  CHECK(lin.z[2] == doctest::Approx(-2.0));

  PermutationWeights bad(2);
  bad.add({0, 1}, 0.5);
  CHECK_THROWS(random_order_attribution(x0x1(), kUnit2, bad));
  PermutationWeights negative(2);
  negative.add({0, 1}, 1.5).add({1, 0}, -0.5);
  CHECK_THROWS(random_order_attribution(x0x1(), kUnit2, negative));
}

TEST_CASE("value-variant attribution") {
  const OrderWeightRule quarter = [](const ValuePair&, const Permutation& rank) {
    return rank[0] == 0 ? 0.25 : 0.75;
  };
  const auto mixed = value_variant_attribution(evaluator_of(x0x1()), kUnit2, quarter);
  CHECK(mixed.z[0] == doctest::Approx(0.75));
  CHECK(mixed.z[1] == doctest::Approx(0.25));

  const ValuePair still({2.0, 3.0}, {2.0, 3.0});
  const auto none = value_variant_example(evaluator_of(x0x1()), still);
  CHECK(none.z[0] == 0.0);
  CHECK(none.z[1] == 0.0);

  CharacteristicFunction single(1);
  single.add_term({0}, 3.0).add_separable(0, ExpFn{});
  const ValuePair one({0.5}, {1.5});
  const auto solo = value_variant_example(evaluator_of(single), one);
  CHECK(solo.z[0] == doctest::Approx(single.evaluate(one.s) - single.evaluate(one.r)));
}

TEST_CASE("order_hash is deterministic and in [0, 1)") {
  const ValuePair vp({0.1, 0.2, 0.3}, {1.0, 2.0, 3.0});
  const double h = order_hash(vp, {0, 1, 2});
  CHECK(h == order_hash(vp, {0, 1, 2}));
  CHECK(h >= 0.0);
  CHECK(h < 1.0);
  CHECK(h != order_hash(vp, {2, 1, 0}));
  CHECK(h != order_hash(ValuePair({0.1, 0.2, 0.3}, {1.0, 2.0, 3.5}), {0, 1, 2}));
}

TEST_CASE("property: uniform random order reduces to brute force and the subset formula") {
  InstanceGenerator gen;
  gen.seed = 17;
  gen.max_vars = 6;
  InstanceStream stream(gen);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = stream.next();
    const std::size_t n = inst.vp.n();
    const auto brute = shapley_shubik_bruteforce(inst.f, inst.vp);
    const auto uniform =
        random_order_attribution(inst.f, inst.vp, PermutationWeights::uniform(n));
    const auto subset = testing::shapley_subset_formula(evaluator_of(inst.f), inst.vp);
    for (Index i = 0; i < n; ++i) {
      CHECK(rel_gap(brute.z[i], uniform.z[i]) <= 1e-12);
      CHECK(rel_gap(brute.z[i], subset[i]) <= 1e-10);
    }
  }
}

TEST_CASE("property: random-order and value-variant methods are complete") {
  InstanceGenerator gen;
  gen.seed = 23;
  gen.max_vars = 5;
  InstanceStream stream(gen);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = stream.next();
    const std::size_t n = inst.vp.n();
    const double change = inst.f.evaluate(inst.vp.s) - inst.f.evaluate(inst.vp.r);

    Permutation rank(n);
    std::iota(rank.begin(), rank.end(), Index{0});
    std::shuffle(rank.begin(), rank.end(), stream.rng());
    const auto single =
        random_order_attribution(inst.f, inst.vp, PermutationWeights::single(rank));
    CHECK(std::abs(single.total() - change) <= 1e-10 * (1.0 + std::abs(change)));

    const auto variant = value_variant_example(evaluator_of(inst.f), inst.vp);
    CHECK(std::abs(variant.total() - change) <= 1e-10 * (1.0 + std::abs(change)));
  }
}

TEST_CASE("property: fixed-weight random-order methods are invariant to affine rescaling") {
  InstanceGenerator gen;
  gen.seed = 29;
  gen.max_vars = 5;
  InstanceStream stream(gen);
  std::uniform_real_distribution<double> cdist(0.1, 10.0);
  std::uniform_real_distribution<double> ddist(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = stream.next();
    const std::size_t n = inst.vp.n();
    PermutationWeights w(n);
    Permutation rank(n);
    std::iota(rank.begin(), rank.end(), Index{0});
    w.add(rank, 0.4);
    std::reverse(rank.begin(), rank.end());
    w.add(rank, 0.6);

    const Index j = static_cast<Index>(trial) % n;
    const double c = cdist(stream.rng());
    const double d = ddist(stream.rng());
    ValuePair moved = inst.vp;
    moved.r[j] = c * moved.r[j] + d;
    moved.s[j] = c * moved.s[j] + d;
    const auto z = random_order_attribution(inst.f, inst.vp, w).z;
    const auto zg =
        random_order_attribution(affine_reparameterize(inst.f, j, c, d), moved, w).z;
    for (Index i = 0; i < n; ++i) CHECK(rel_gap(z[i], zg[i]) <= 1e-10);
  }
}

TEST_CASE("property: brute-force Shapley-Shubik satisfies monotonicity and conditional nonnegativity") {
  const AttributionMethod brute = [](const CharacteristicFunction& f, const ValuePair& vp) {
    return shapley_shubik_bruteforce(f, vp);
  };
  for (Axiom axiom : {Axiom::Monotonicity, Axiom::ConditionalNonnegativity}) {
    const auto verdict = check_axiom(brute, axiom, generator_for(axiom, 31), 100);
    CHECK(verdict.checks > 0);
    CHECK(verdict.passed);
  }
}
