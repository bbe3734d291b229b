#pragma once

// Named models and their text formats.
//
// Model file (one directive per line, '#' starts a comment):
//
//   variables: a p c
//   term: <coeff> [var ...]              coeff * product of vars
//   separable: <var> poly <c0> [c1 ...]  c0 + c1 x + ...
//   separable: <var> affine <slope> <intercept>
//   separable: <var> log <scale> <slope> <shift>
//   separable: <var> exp <scale> <slope> <shift>
//   separable: <var> pow <scale> <slope> <shift> <int exponent>
//   segment: <label> <var> [var ...]
//
// DAG file:
//
//   nodes: a b t
//   sink: t
//   start: <node> <var>
//   edge: <from> <to> <var>
//
// Values file (CSV, optional header): entity,variable,initial,final

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/characteristic.hpp"

namespace attrib {

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Segment {
  std::string label;
  std::vector<std::string> members;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct ModelSpec {
  std::vector<std::string> names;
  CharacteristicFunction f;
  std::vector<Segment> segments;

  Index index_of(std::string_view name) const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

ModelSpec parse_model(std::string_view text);
/// Numbers are written in shortest round-trip form, so
/// parse_model(format_model(m)) == m bit for bit.
std::string format_model(const ModelSpec& model);

struct DagEdge {
  std::string from;
  std::string to;
  std::string var;
};

struct DagStart {
  std::string node;
  std::string var;
};

struct DagModel {
  std::vector<std::string> nodes;
  std::string sink;
  std::vector<DagStart> starts;
  std::vector<DagEdge> edges;
};

DagModel parse_dag(std::string_view text);

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

/// One monomial per (start node, path to the sink): the start variable times
/// the edge variables along the path.  Variables are ordered starts first,
/// then edges, in declaration order.
ModelSpec compile_dag(const DagModel& dag, std::size_t path_cap = kDefaultPathCap);

struct ValueSnapshot {
  std::string entity;
  ValuePair values;
};

/// Groups rows by entity (first-appearance order) and checks that each entity
/// covers every model variable exactly once.
std::vector<ValueSnapshot> parse_snapshots(std::string_view csv,
                                           const std::vector<std::string>& names);

std::string read_file(const std::string& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);
double parse_number(std::string_view token);

namespace presets {

/// e = a * p * c
ModelSpec procurement();
/// q * b * sum_i p_i * ctr_i * cpc_i; segments group each auction position.
ModelSpec spend(std::size_t positions = 4);
/// sum_i r_i * w_i; segments "allocation" (w) and "selection" (r).
ModelSpec portfolio(std::size_t assets);
/// sum_i n_i * m_i * a_i * p_i / 100 with p_i in percent; segments per player.
ModelSpec basketball(std::size_t players);
/// cpc_search * clicks_search + cpc_content * clicks_content.
ModelSpec segmented_spend();

ModelSpec by_name(std::string_view name, std::size_t size);

}  // namespace presets

}  // namespace attrib
