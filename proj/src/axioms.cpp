#include "attrib/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "attrib/exact.hpp"
#include "attrib/oracle.hpp"

namespace attrib {

namespace {

constexpr std::pair<Axiom, std::string_view> kAxiomNames[] = {
    {Axiom::Completeness, "completeness"},
    {Axiom::Dummy, "dummy"},
    {Axiom::DummyPrime, "dummy-prime"},
    {Axiom::Additivity, "additivity"},
    {Axiom::Anonymity, "anonymity"},
    {Axiom::ConditionalNonnegativity, "conditional-nonnegativity"},
    {Axiom::Monotonicity, "monotonicity"},
    {Axiom::ScaleInvariance, "scale-invariance"},
    {Axiom::AffineScaleInvariance, "affine-scale-invariance"},
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

std::string_view axiom_name(Axiom axiom) {
  for (const auto& [id, name] : kAxiomNames) {
    if (id == axiom) return name;
  }
  return "unknown";
}

Axiom parse_axiom(std::string_view name) {
  for (const auto& [id, id_name] : kAxiomNames) {
    if (id_name == name) return id;
  }
  throw std::invalid_argument("unknown axiom '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Instance generation

InstanceStream::InstanceStream(InstanceGenerator gen) : gen_(std::move(gen)), rng_(gen_.seed) {
  if (gen_.min_vars < 1 || gen_.max_vars < gen_.min_vars) {
    throw std::invalid_argument("generator variable range is empty");
  }
  if (gen_.max_terms < gen_.min_terms) {
    throw std::invalid_argument("generator term range is empty");
  }
}

CharacteristicFunction InstanceStream::function(std::size_t n) {
  CharacteristicFunction f(n);
  const std::size_t eligible = gen_.dummy_variable && n > 1 ? n - 1 : n;
  std::vector<Index> vars(eligible);
  std::iota(vars.begin(), vars.end(), Index{0});

  const std::size_t terms = uniform_index(rng_, gen_.min_terms, gen_.max_terms);
  for (std::size_t t = 0; t < terms; ++t) {
    double coeff = uniform(rng_, gen_.coeff_lo, gen_.coeff_hi);
    if (gen_.nonnegative_coefficients) coeff = std::abs(coeff);
    // Occasionally a constant term; otherwise a random non-empty subset.
    const std::size_t size = uniform(rng_, 0.0, 1.0) < 0.1 ? 0 : uniform_index(rng_, 1, eligible);
    std::shuffle(vars.begin(), vars.end(), rng_);
    f.add_term(Subset(vars.begin(), vars.begin() + static_cast<std::ptrdiff_t>(size)), coeff);
  }

  for (Index i = 0; i < eligible; ++i) {
    if (uniform(rng_, 0.0, 1.0) >= gen_.separable_probability) continue;
    switch (uniform_index(rng_, 0, 3)) {
      case 0: {
        PolynomialFn p;
        const std::size_t degree = uniform_index(rng_, 1, 3);
        for (std::size_t k = 0; k <= degree; ++k) p.coeffs.push_back(uniform(rng_, -2.0, 2.0));
        f.add_separable(i, p);
        break;
      }
      case 1:
        f.add_separable(i, AffineFn{uniform(rng_, -3.0, 3.0), uniform(rng_, -3.0, 3.0)});
        break;
      case 2:
        f.add_separable(i, ExpFn{uniform(rng_, -2.0, 2.0), uniform(rng_, -0.5, 0.5), 0.0});
        break;
      default: {
        // Keep the argument >= 0.5 on the whole sampling range.
        const double slope = uniform(rng_, 0.5, 2.0);
        const double shift = 0.5 - slope * gen_.value_lo + uniform(rng_, 0.0, 1.0);
        f.add_separable(i, LogFn{uniform(rng_, -2.0, 2.0), slope, shift});
        break;
      }
    }
  }
  return f;
}

ValuePair InstanceStream::values(std::size_t n) {
  std::vector<double> r(n);
  std::vector<double> s(n);
  for (Index i = 0; i < n; ++i) {
    do {
      r[i] = uniform(rng_, gen_.value_lo, gen_.value_hi);
      s[i] = uniform(rng_, gen_.value_lo, gen_.value_hi);
    } while (gen_.avoid_degenerate && r[i] == s[i]);
    if (gen_.ordered_values && r[i] > s[i]) std::swap(r[i], s[i]);
  }
  return {std::move(r), std::move(s)};
}

Instance InstanceStream::next() {
  if (gen_.fixed_function) {
    if (gen_.fixed_values) return {*gen_.fixed_function, *gen_.fixed_values};
    return {*gen_.fixed_function, values(gen_.fixed_function->n())};
  }
  const std::size_t n = uniform_index(rng_, gen_.min_vars, gen_.max_vars);
  auto f = function(n);
  return {std::move(f), values(n)};
}

InstanceGenerator generator_for(Axiom axiom, std::uint64_t seed) {
  InstanceGenerator gen;
  gen.seed = seed;
  switch (axiom) {
    case Axiom::Dummy:
      gen.dummy_variable = true;
      break;
    case Axiom::ConditionalNonnegativity:
      gen.nonnegative_coefficients = true;
      gen.value_lo = 0.0;
      break;
    case Axiom::Monotonicity:
      gen.nonnegative_coefficients = true;
      gen.value_lo = 0.0;
      gen.separable_probability = 0.0;
      break;
    default:
      break;
  }
  return gen;
}

// ---------------------------------------------------------------------------
// Certificates on the box [r, s]

namespace {

bool has_separable_on(const CharacteristicFunction& f, Index i) {
  return std::any_of(f.separable().begin(), f.separable().end(),
                     [i](const SeparableTerm& t) { return t.var == i; });
}

// Calls visit(vertex) for every vertex of [r, s] with coordinate i fixed at r_i
// (d_i f of a multilinear f does not depend on x_i).
template <class Visit>
bool all_vertices(const ValuePair& vp, Index i, Visit visit) {
  const std::size_t n = vp.n();
  std::vector<Index> others;
  for (Index j = 0; j < n; ++j) {
    if (j != i) others.push_back(j);
  }
  if (others.size() >= 63) {
    throw std::invalid_argument("vertex certificate limited to 63 free variables");
  }
  std::vector<double> u = vp.r;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
    for (std::size_t b = 0; b < others.size(); ++b) {
      const Index j = others[b];
      u[j] = (mask >> b) & 1u ? vp.s[j] : vp.r[j];
    }
    if (!visit(u)) return false;
  }
  return true;
}

}  // namespace

bool certified_nondecreasing(const CharacteristicFunction& f, const ValuePair& vp, Index i) {
  if (has_separable_on(f, i)) return false;
  const auto d = partial_derivative(f, i);
  return all_vertices(vp, i, [&d](const std::vector<double>& u) { return d.evaluate(u) >= 0.0; });
}

bool certified_independent(const CharacteristicFunction& f, const ValuePair& vp, Index i) {
  if (has_separable_on(f, i)) return false;
  const auto d = partial_derivative(f, i);
  return all_vertices(vp, i, [&d](const std::vector<double>& u) { return d.evaluate(u) == 0.0; });
}

// ---------------------------------------------------------------------------
// Axiom checks

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

class VerdictBuilder {
public:
  VerdictBuilder(Axiom axiom, const AxiomTolerance& tol) : tol_(tol) { verdict_.axiom = axiom; }

  // Records one comparison; `violation` is how far the predicate is missed
  // (<= 0 when it holds), `scale` the magnitude used for the relative part.
  void record(double violation, double scale, const Instance& inst, std::string detail) {
    ++verdict_.checks;
    const double excess = violation - (tol_.abs + tol_.rel * scale);
    if (violation > verdict_.worst_violation) verdict_.worst_violation = violation;
    if (excess > 0.0) {
      verdict_.passed = false;
      if (excess > worst_excess_) {
        worst_excess_ = excess;
        verdict_.counterexample = Counterexample{to_string(inst.f), inst.vp, std::move(detail)};
      }
    }
  }

  void failure(const Instance& inst, std::string what) {
    verdict_.passed = false;
    if (!verdict_.counterexample) {
      verdict_.counterexample = Counterexample{to_string(inst.f), inst.vp, what};
    }
    if (verdict_.note.empty()) verdict_.note = std::move(what);
  }

  AxiomVerdict& verdict() { return verdict_; }

private:
  AxiomTolerance tol_;
  AxiomVerdict verdict_;
  double worst_excess_ = 0.0;
};

std::string describe(std::string_view what, Index i, double lhs, double rhs) {
  std::ostringstream out;
  out.precision(17);
  out << what << " at variable " << i << ": " << lhs << " vs " << rhs;
  return out.str();
}

void compare_vectors(VerdictBuilder& vb, const Instance& inst, std::string_view what,
                     const std::vector<double>& lhs, const std::vector<double>& rhs) {
  const double scale = std::max(max_abs(lhs), max_abs(rhs));
  for (Index i = 0; i < lhs.size(); ++i) {
    vb.record(std::abs(lhs[i] - rhs[i]), scale, inst, describe(what, i, lhs[i], rhs[i]));
  }
}

void run_trial(const AttributionMethod& method, Axiom axiom, InstanceStream& stream,
               VerdictBuilder& vb) {
  Instance inst = stream.next();
  const std::size_t n = inst.vp.n();
  auto& rng = stream.rng();

  switch (axiom) {
    case Axiom::Completeness: {
      const auto res = method(inst.f, inst.vp);
      const double change = inst.f.evaluate(inst.vp.s) - inst.f.evaluate(inst.vp.r);
      const double residual = res.total() - change;
      std::ostringstream detail;
      detail.precision(17);
      detail << "sum of attributions " << res.total() << " vs change " << change
             << " (residual " << residual << ")";
      vb.record(std::abs(residual), std::max(std::abs(change), max_abs(res.z)), inst,
                detail.str());
      break;
    }
    case Axiom::Dummy: {
      const auto res = method(inst.f, inst.vp);
      for (Index i = 0; i < n; ++i) {
        if (!inst.f.mentions(i)) {
          vb.record(std::abs(res.z[i]), 0.0, inst, describe("dummy attribution", i, res.z[i], 0.0));
        }
      }
      break;
    }
    case Axiom::DummyPrime: {
      if (n < 2) return;
      const Index i = uniform_index(rng, 0, n - 1);
      Index k = uniform_index(rng, 0, n - 2);
      if (k >= i) ++k;
      // Every monomial in x_i also gets x_k, and x_k is pinned to 0 on the
      // box, so f no longer depends on x_i there.
      CharacteristicFunction g(n);
      for (const auto& [indices, coeff] : inst.f.multilinear().terms()) {
        Subset term = indices;
        const bool has_i = std::binary_search(term.begin(), term.end(), i);
        const bool has_k = std::binary_search(term.begin(), term.end(), k);
        if (has_i && !has_k) term.push_back(k);
        g.add_term(std::move(term), coeff);
      }
      for (const auto& term : inst.f.separable()) {
        if (term.var != i) g.add_separable(term.var, term.fn);
      }
      ValuePair vp = inst.vp;
      vp.r[k] = 0.0;
      vp.s[k] = 0.0;
      Instance box{std::move(g), std::move(vp)};
      if (!certified_independent(box.f, box.vp, i)) return;
      const auto res = method(box.f, box.vp);
      vb.record(std::abs(res.z[i]), max_abs(res.z), box,
                describe("attribution to variable constant on the box", i, res.z[i], 0.0));
      break;
    }
    case Axiom::Additivity: {
      const auto other = stream.function(n);
      const auto sum = combine(inst.f, other, 1.0, 1.0);
      const auto z1 = method(inst.f, inst.vp).z;
      const auto z2 = method(other, inst.vp).z;
      const auto z12 = method(sum, inst.vp).z;
      std::vector<double> separate(n);
      for (Index i = 0; i < n; ++i) separate[i] = z1[i] + z2[i];
      compare_vectors(vb, Instance{sum, inst.vp}, "z(f1+f2) vs z(f1)+z(f2)", z12, separate);
      break;
    }
    case Axiom::Anonymity: {
      std::vector<Index> sigma(n);
      std::iota(sigma.begin(), sigma.end(), Index{0});
      std::shuffle(sigma.begin(), sigma.end(), rng);
      const auto g = permute_variables(inst.f, sigma);
      ValuePair vp = inst.vp;
      for (Index i = 0; i < n; ++i) {
        vp.r[sigma[i]] = inst.vp.r[i];
        vp.s[sigma[i]] = inst.vp.s[i];
      }
      const auto z = method(inst.f, inst.vp).z;
      const auto zp = method(g, vp).z;
      std::vector<double> pulled(n);
      for (Index i = 0; i < n; ++i) pulled[i] = zp[sigma[i]];
      compare_vectors(vb, inst, "relabelled attribution", pulled, z);
      break;
    }
    case Axiom::ConditionalNonnegativity: {
      std::vector<Index> certified;
      for (Index i = 0; i < n; ++i) {
        if (certified_nondecreasing(inst.f, inst.vp, i)) certified.push_back(i);
      }
      if (certified.empty()) return;
      const auto res = method(inst.f, inst.vp);
      const double scale = max_abs(res.z);
      for (Index i : certified) {
        const double signed_z = inst.vp.s[i] >= inst.vp.r[i] ? res.z[i] : -res.z[i];
        vb.record(-signed_z, scale, inst,
                  describe("attribution against direction of change", i, res.z[i], 0.0));
      }
      break;
    }
    case Axiom::Monotonicity: {
      const Index j = uniform_index(rng, 0, n - 1);
      ValuePair raised = inst.vp;
      raised.s[j] += uniform(rng, 0.1, 2.0);
      ValuePair hull = inst.vp;
      hull.s[j] = raised.s[j];
      if (!certified_nondecreasing(inst.f, inst.vp, j) ||
          !certified_nondecreasing(inst.f, hull, j)) {
        return;
      }
      const double before = method(inst.f, inst.vp).z[j];
      const double after = method(inst.f, raised).z[j];
      vb.record(before - after, std::max(std::abs(before), std::abs(after)), inst,
                describe("attribution decreased when s_j increased", j, before, after));
      break;
    }
    case Axiom::ScaleInvariance:
    case Axiom::AffineScaleInvariance: {
      const Index j = uniform_index(rng, 0, n - 1);
      const double c = std::exp(uniform(rng, std::log(0.1), std::log(10.0)));
      const double d = axiom == Axiom::AffineScaleInvariance ? uniform(rng, -5.0, 5.0) : 0.0;
      const auto g = affine_reparameterize(inst.f, j, c, d);
      ValuePair vp = inst.vp;
      vp.r[j] = c * vp.r[j] + d;
      vp.s[j] = c * vp.s[j] + d;
      const auto z = method(inst.f, inst.vp).z;
      const auto zg = method(g, vp).z;
      compare_vectors(vb, inst, "rescaled attribution", zg, z);
      break;
    }
  }
}

}  // namespace

AxiomVerdict check_axiom(const AttributionMethod& method, Axiom axiom,
                         const InstanceGenerator& gen, std::size_t trials,
                         const AxiomTolerance& tol) {
  InstanceStream stream(gen);
  VerdictBuilder vb(axiom, tol);
  for (std::size_t t = 0; t < trials; ++t) {
    ++vb.verdict().trials;
    try {
      run_trial(method, axiom, stream, vb);
    } catch (const std::exception& e) {
      vb.failure(Instance{CharacteristicFunction(0), ValuePair{}},
                 std::string("method failed: ") + e.what());
    }
  }
  auto verdict = std::move(vb.verdict());
  if (verdict.checks == 0) {
    verdict.checkable = false;
    verdict.passed = false;
    if (verdict.note.empty()) verdict.note = "no instance satisfied the axiom's hypotheses";
  }
  return verdict;
}

std::vector<SuiteEntry> run_axiom_suite(std::uint64_t seed, std::size_t trials,
                                        const AxiomTolerance& tol) {
  std::vector<SuiteEntry> suite;
  const AttributionMethod ass = [](const CharacteristicFunction& f, const ValuePair& vp) {
    return attribute_ass(f, vp);
  };
  for (Axiom axiom : kAllAxioms) {
    suite.push_back({"ass", check_axiom(ass, axiom, generator_for(axiom, seed), trials, tol), true});
  }

  InstanceGenerator intro;
  intro.seed = seed;
  intro.fixed_function = CharacteristicFunction(3).add_term({0, 1, 2}, 1.0);
  intro.fixed_values = ValuePair({4.0, 1.0, 1.0}, {5.0, 12.0, 1.5});
  const AttributionMethod naive = [](const CharacteristicFunction& f, const ValuePair& vp) {
    return attribute_naive(f, vp);
  };
  suite.push_back({"naive", check_axiom(naive, Axiom::Completeness, intro, 1, tol), false});

  InstanceGenerator product;
  product.seed = seed;
  product.fixed_function = CharacteristicFunction(2).add_term({0, 1}, 1.0);
  const PermutationWeights identity = PermutationWeights::single({0, 1});
  const AttributionMethod single_order = [identity](const CharacteristicFunction& f,
                                                    const ValuePair& vp) {
    return random_order_attribution(f, vp, identity);
  };
  suite.push_back(
      {"single-order", check_axiom(single_order, Axiom::Anonymity, product, 50, tol), false});
  return suite;
}

DivergenceReport divergence_witness(const BlackBoxFunction& f, const ValuePair& vp,
                                    const QuadratureConfig& q) {
  DivergenceReport report;
  report.aumann_shapley = attribute_aumann_shapley(f, vp, q);
  report.shapley_shubik = shapley_shubik_bruteforce(f.value, vp);
  report.gap.resize(vp.n());
  for (Index i = 0; i < vp.n(); ++i) {
    report.gap[i] = std::abs(report.aumann_shapley.z[i] - report.shapley_shubik.z[i]);
    report.max_gap = std::max(report.max_gap, report.gap[i]);
  }
  return report;
}

}  // namespace attrib
