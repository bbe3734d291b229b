#pragma once

// Randomised checks of the attribution axioms against any AttributionMethod,
// plus the Aumann-Shapley vs Shapley-Shubik divergence report for functions
// outside the multilinear + separable class.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/characteristic.hpp"
#include "attrib/path.hpp"

namespace attrib {

enum class Axiom {
  Completeness,
  Dummy,
  DummyPrime,
  Additivity,
  Anonymity,
  ConditionalNonnegativity,
  Monotonicity,
  ScaleInvariance,
  AffineScaleInvariance,
};

inline constexpr Axiom kAllAxioms[] = {
    Axiom::Completeness,  Axiom::Dummy,
    Axiom::DummyPrime,    Axiom::Additivity,
    Axiom::Anonymity,     Axiom::ConditionalNonnegativity,
    Axiom::Monotonicity,  Axiom::ScaleInvariance,
    Axiom::AffineScaleInvariance,
};

std::string_view axiom_name(Axiom axiom);
/// Parses the names returned by axiom_name; throws on unknown ids.
Axiom parse_axiom(std::string_view name);

struct Instance {
  CharacteristicFunction f;
  ValuePair vp;
};

struct InstanceGenerator {
  std::uint64_t seed = 1;
  std::size_t min_vars = 2;
  std::size_t max_vars = 6;
  std::size_t min_terms = 1;
  std::size_t max_terms = 8;
  double coeff_lo = -10.0;
  double coeff_hi = 10.0;
  double value_lo = -3.0;
  double value_hi = 3.0;
  bool nonnegative_coefficients = false;
  /// Sample with r_i <= s_i for every i.
  bool ordered_values = false;
  /// Probability that a variable gets a separable term.
  double separable_probability = 0.3;
  /// Resample r_i == s_i.
  bool avoid_degenerate = true;
  /// Keep the last variable out of every term.
  bool dummy_variable = false;
  /// When set, every instance uses this function (values are still random).
  std::optional<CharacteristicFunction> fixed_function;
  /// When set together with fixed_function, every instance is this one.
  std::optional<ValuePair> fixed_values;
};

/// Deterministic stream of instances for a generator.
class InstanceStream {
public:
  explicit InstanceStream(InstanceGenerator gen);

  Instance next();
  /// Random function with exactly n variables.
  CharacteristicFunction function(std::size_t n);
  ValuePair values(std::size_t n);
  std::mt19937_64& rng() { return rng_; }

private:
  InstanceGenerator gen_;
  std::mt19937_64 rng_;
};

struct AxiomTolerance {
  double abs = 1e-8;
  double rel = 1e-8;
};

struct Counterexample {
  std::string function;
  ValuePair values;
  std::string detail;
};

struct AxiomVerdict {
  Axiom axiom = Axiom::Completeness;
  bool passed = true;
  /// False when the axiom cannot be checked for this method or instance class.
  bool checkable = true;
  std::size_t trials = 0;
  /// Number of individual comparisons made (some trials yield none).
  std::size_t checks = 0;
  /// Largest raw violation seen (absolute units of the compared quantity).
  double worst_violation = 0.0;
  std::optional<Counterexample> counterexample;
  std::string note;
};

AxiomVerdict check_axiom(const AttributionMethod& method, Axiom axiom,
                         const InstanceGenerator& gen, std::size_t trials,
                         const AxiomTolerance& tol = {});

/// Generator suited to an axiom's hypotheses (e.g. non-negative coefficients
/// for Monotonicity, an untouched variable for Dummy).
InstanceGenerator generator_for(Axiom axiom, std::uint64_t seed);

/// Certifies that multilinear f is non-decreasing in variable i on [r, s] by
/// checking d_i f >= 0 on the vertices of the box.  Returns false when f has
/// a separable term on i.
bool certified_nondecreasing(const CharacteristicFunction& f, const ValuePair& vp, Index i);

/// True when d_i f vanishes on every vertex of [r, s] (multilinear f without
/// a separable term on i), i.e. f does not depend on x_i inside the box.
bool certified_independent(const CharacteristicFunction& f, const ValuePair& vp, Index i);

struct DivergenceReport {
  AttributionResult aumann_shapley;
  AttributionResult shapley_shubik;
  std::vector<double> gap;
  double max_gap = 0.0;
};

/// The standard battery: the exact method against every axiom, the naive
/// baseline against Completeness on the procurement example, and a
/// single-order method against Anonymity on f = x0 * x1.
struct SuiteEntry {
  std::string method;
  AxiomVerdict verdict;
  /// Whether the method is expected to satisfy the axiom.
  bool expected_pass = true;

  bool as_expected() const { return verdict.passed == expected_pass; }
};

std::vector<SuiteEntry> run_axiom_suite(std::uint64_t seed, std::size_t trials = 200,
                                        const AxiomTolerance& tol = {});

DivergenceReport divergence_witness(const BlackBoxFunction& f, const ValuePair& vp,
                                    const QuadratureConfig& q = {});

}  // namespace attrib
