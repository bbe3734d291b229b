#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/model.hpp"
#include "attrib/path.hpp"

namespace attrib {

struct ReportOptions {
  /// Quadrature tolerance for as-numeric.
  double tol = 1e-10;
  /// Base directory for relative random-order weight files.
  std::string weights_dir;
};

/// Resolves a method id: ass, ss-brute, as-numeric, naive, or
/// random-order:<weights-file>.  Weight files hold one order per line,
/// `<weight>,<var>,<var>,...`, listing every variable in the order it moves.
AttributionMethod make_method(std::string_view id, const ModelSpec& model,
                              const ReportOptions& options = {});

/// Declared completeness tolerance of a method id (relative to |f(s)-f(r)|),
/// or a negative value for methods that are not complete.
double completeness_tolerance(std::string_view id, const ReportOptions& options = {});

struct SegmentTotal {
  std::string label;
  double attribution = 0.0;
};

struct Report {
  std::string entity;
  std::string method;
  std::vector<std::string> names;
  ValuePair values;
  std::vector<double> z;
  double change = 0.0;
  double residual = 0.0;
  bool converged = true;
  std::vector<SegmentTotal> segments;
};

Report run_report(const ModelSpec& model, const ValueSnapshot& snapshot, std::string_view method,
                  const ReportOptions& options = {});

/// Segment totals are plain sums of member attributions.
std::vector<SegmentTotal> aggregate_segments(const ModelSpec& model,
                                             const std::vector<double>& z);

void write_text(std::ostream& out, const Report& report);
/// One JSON object per line: a record per variable, per segment, and a summary.
void write_machine(std::ostream& out, const Report& report);

/// Residuals and totals are always printed with 12 significant digits.
std::string format_sig12(double value);

struct MixEffectsReport {
  double search_cpc_initial = 1.0, search_cpc_final = 2.0;
  double search_clicks_initial = 100.0, search_clicks_final = 100.0;
  double content_cpc_initial = 0.01, content_cpc_final = 0.02;
  double content_clicks_initial = 100.0, content_clicks_final = 10000.0;
  double overall_cpc_initial = 0.0, overall_cpc_final = 0.0;

  /// Per-segment attributions to the two CPC variables and their sum.
  double search_cpc_attribution = 0.0;
  double content_cpc_attribution = 0.0;
  double aggregated_cpc_attribution = 0.0;
  /// Attribution to the overall CPC in spend = overall_cpc * total_clicks.
  double aggregate_first_cpc_attribution = 0.0;
  double total_change = 0.0;
};

MixEffectsReport mix_effects_demo();
void write_text(std::ostream& out, const MixEffectsReport& report);

}  // namespace attrib
