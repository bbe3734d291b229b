// attrib: attribute the change f(s) - f(r) of a model to its variables.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrib/axioms.hpp"
#include "attrib/model.hpp"
#include "attrib/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;

int run_axiom_suite(std::uint64_t seed, bool machine) {
  const auto suite = attrib::run_axiom_suite(seed);
  bool all_expected = true;
  for (const auto& entry : suite) {
    const auto& v = entry.verdict;
    all_expected = all_expected && entry.as_expected();
    if (machine) {
      nlohmann::json rec{{"method", entry.method},
                         {"axiom", attrib::axiom_name(v.axiom)},
                         {"passed", v.passed},
                         {"expected_pass", entry.expected_pass},
                         {"checkable", v.checkable},
                         {"trials", v.trials},
                         {"checks", v.checks},
                         {"worst_violation", v.worst_violation}};
      if (v.counterexample) {
        rec["counterexample"] = {{"function", v.counterexample->function},
                                 {"initial", v.counterexample->values.r},
                                 {"final", v.counterexample->values.s},
                                 {"detail", v.counterexample->detail}};
      }
      if (!v.note.empty()) rec["note"] = v.note;
      std::cout << rec.dump() << '\n';
      continue;
    }
    std::cout << (entry.as_expected() ? "ok    " : "FAIL  ") << entry.method << " / "
              << attrib::axiom_name(v.axiom) << ": " << (v.passed ? "holds" : "violated")
              << " (" << v.trials << " trials, " << v.checks
              << " checks, worst violation " << attrib::format_sig12(v.worst_violation) << ")\n";
    if (v.counterexample) {
      std::cout << "      counterexample: f = " << v.counterexample->function << "; "
                << v.counterexample->detail << '\n';
    }
  }
  return all_expected ? kExitOk : kExitSuiteFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute the change in a known function to its variables"};

  std::string model_path;
  std::string dag_path;
  std::string values_path;
  std::string method = "ass";
  std::string report_kind = "text";
  std::string preset;
  std::size_t preset_size = 0;
  std::string demo;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  bool axiom_suite = false;
  bool emit_model = false;

  app.add_option("--model", model_path, "Model file");
  app.add_option("--dag", dag_path, "DAG model file");
  app.add_option("--preset", preset,
                 "Built-in model: procurement, spend, portfolio, basketball, segmented-spend");
  app.add_option("--preset-size", preset_size,
                 "Positions / assets / players for the spend, portfolio, basketball presets");
  app.add_option("--values", values_path, "CSV of entity,variable,initial,final");
  app.add_option("--method", method,
                 "ass | ss-brute | as-numeric | naive | random-order:<weights-file>");
  app.add_option("--tol", tol, "Quadrature tolerance for as-numeric");
  app.add_option("--seed", seed, "Seed for the axiom suite");
  app.add_option("--report", report_kind, "Output format")->check(CLI::IsMember({"text", "machine"}));
  app.add_flag("--axiom-suite", axiom_suite, "Run the axiom checks and print verdicts");
  app.add_option("--demo", demo, "Built-in demonstration")->check(CLI::IsMember({"mix-effects"}));
  app.add_flag("--emit-model", emit_model, "Print the loaded model in model-file syntax");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const bool machine = report_kind == "machine";
  try {
    if (axiom_suite) return run_axiom_suite(seed, machine);

    if (!demo.empty()) {
      const auto rep = attrib::mix_effects_demo();
      if (machine) {
        std::cout << nlohmann::json{{"demo", "mix-effects"},
                                    {"search_cpc", rep.search_cpc_attribution},
                                    {"content_cpc", rep.content_cpc_attribution},
                                    {"aggregated_cpc", rep.aggregated_cpc_attribution},
                                    {"aggregate_first_cpc", rep.aggregate_first_cpc_attribution},
                                    {"overall_cpc_initial", rep.overall_cpc_initial},
                                    {"overall_cpc_final", rep.overall_cpc_final}}
                         .dump()
                  << '\n';
      } else {
        attrib::write_text(std::cout, rep);
      }
      return kExitOk;
    }

    const int sources = !model_path.empty() + !dag_path.empty() + !preset.empty();
    if (sources != 1) {
      std::cerr << "error: give exactly one of --model, --dag, --preset\n";
      return kExitInput;
    }
    attrib::ModelSpec model;
    if (!model_path.empty()) {
      model = attrib::parse_model(attrib::read_file(model_path));
    } else if (!dag_path.empty()) {
      model = attrib::compile_dag(attrib::parse_dag(attrib::read_file(dag_path)));
    } else {
      model = attrib::presets::by_name(preset, preset_size);
    }

    if (emit_model) {
      std::cout << attrib::format_model(model);
      if (values_path.empty()) return kExitOk;
    }
    if (values_path.empty()) {
      std::cerr << "error: --values is required\n";
      return kExitInput;
    }

    attrib::ReportOptions options;
    options.tol = tol;
    const auto snapshots =
        attrib::parse_snapshots(attrib::read_file(values_path), model.names);
    bool converged = true;
    for (const auto& snapshot : snapshots) {
      const auto report = attrib::run_report(model, snapshot, method, options);
      converged = converged && report.converged;
      if (machine) {
        attrib::write_machine(std::cout, report);
      } else {
        attrib::write_text(std::cout, report);
        std::cout << '\n';
      }
    }
    return converged ? kExitOk : kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
