#include "attrib/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <variant>

namespace attrib {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

struct Directive {
  std::size_t line = 0;
  std::string key;
  std::vector<std::string> args;
};

std::vector<Directive> directives(std::string_view text) {
  std::vector<Directive> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected 'key: values'");
    }
    out.push_back({line_no, std::string(trim(line.substr(0, colon))),
                   split_words(line.substr(colon + 1))});
  }
  return out;
}

[[noreturn]] void fail(const Directive& d, const std::string& what) {
  throw InputError("line " + std::to_string(d.line) + " (" + d.key + "): " + what);
}

double number_arg(const Directive& d, std::size_t k) {
  if (k >= d.args.size()) fail(d, "missing numeric argument");
  try {
    return parse_number(d.args[k]);
  } catch (const InputError& e) {
    fail(d, e.what());
  }
}

void require_args(const Directive& d, std::size_t count) {
  if (d.args.size() != count) {
    fail(d, "expected " + std::to_string(count) + " arguments, got " +
                std::to_string(d.args.size()));
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

double parse_number(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw InputError("not a number: '" + std::string(token) + "'");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Index ModelSpec::index_of(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("unknown variable '" + std::string(name) + "'");
  return static_cast<Index>(it - names.begin());
}

// ---------------------------------------------------------------------------
// Model files

ModelSpec parse_model(std::string_view text) {
  const auto lines = directives(text);
  ModelSpec model;
  bool have_variables = false;
  for (const auto& d : lines) {
    if (d.key == "variables") {
      if (have_variables) fail(d, "variables declared twice");
      std::set<std::string> unique(d.args.begin(), d.args.end());
      if (unique.size() != d.args.size()) fail(d, "variable names must be unique");
      model.names = d.args;
      model.f = CharacteristicFunction(model.names.size());
      have_variables = true;
      continue;
    }
    if (!have_variables) fail(d, "'variables:' must come first");
    auto var = [&](const std::string& name) {
      try {
        return model.index_of(name);
      } catch (const InputError& e) {
        fail(d, e.what());
      }
    };
    if (d.key == "term") {
      const double coeff = number_arg(d, 0);
      Subset subset;
      for (std::size_t k = 1; k < d.args.size(); ++k) subset.push_back(var(d.args[k]));
      try {
        model.f.add_term(std::move(subset), coeff);
      } catch (const std::invalid_argument& e) {
        fail(d, e.what());
      }
    } else if (d.key == "separable") {
      if (d.args.size() < 2) fail(d, "expected '<var> <kind> params...'");
      const Index i = var(d.args[0]);
      const std::string& kind = d.args[1];
      UnivariateFn fn;
      if (kind == "poly") {
        PolynomialFn p;
        for (std::size_t k = 2; k < d.args.size(); ++k) p.coeffs.push_back(number_arg(d, k));
        if (p.coeffs.empty()) fail(d, "poly needs at least one coefficient");
        fn = p;
      } else if (kind == "affine") {
        require_args(d, 4);
        fn = AffineFn{number_arg(d, 2), number_arg(d, 3)};
      } else if (kind == "log") {
        require_args(d, 5);
        fn = LogFn{number_arg(d, 2), number_arg(d, 3), number_arg(d, 4)};
      } else if (kind == "exp") {
        require_args(d, 5);
        fn = ExpFn{number_arg(d, 2), number_arg(d, 3), number_arg(d, 4)};
      } else if (kind == "pow") {
        require_args(d, 6);
        const double e = number_arg(d, 5);
        if (e != static_cast<int>(e)) fail(d, "pow exponent must be an integer");
        fn = PowerFn{number_arg(d, 2), number_arg(d, 3), number_arg(d, 4), static_cast<int>(e)};
      } else {
        fail(d, "unknown separable kind '" + kind + "'");
      }
      model.f.add_separable(i, std::move(fn));
    } else if (d.key == "segment") {
      if (d.args.size() < 2) fail(d, "expected '<label> <var> ...'");
      Segment seg{d.args[0], {d.args.begin() + 1, d.args.end()}};
      for (const auto& name : seg.members) {
        var(name);
        for (const auto& other : model.segments) {
          if (std::find(other.members.begin(), other.members.end(), name) !=
              other.members.end()) {
            fail(d, "variable '" + name + "' already belongs to segment '" + other.label + "'");
          }
        }
      }
      model.segments.push_back(std::move(seg));
    } else {
      fail(d, "unknown directive");
    }
  }
  if (!have_variables) throw InputError("model declares no variables");
  return model;
}

std::string format_model(const ModelSpec& model) {
  std::ostringstream out;
  out << "variables:";
  for (const auto& name : model.names) out << ' ' << name;
  out << '\n';
  for (const auto& [indices, coeff] : model.f.multilinear().terms()) {
    out << "term: " << format_number(coeff);
    for (Index i : indices) out << ' ' << model.names[i];
    out << '\n';
  }
  for (const auto& term : model.f.separable()) {
    out << "separable: " << model.names[term.var] << ' ' << kind_name(term.fn);
    std::visit(
        [&out](const auto& fn) {
          using T = std::decay_t<decltype(fn)>;
          if constexpr (std::is_same_v<T, PolynomialFn>) {
            for (double c : fn.coeffs) out << ' ' << format_number(c);
            if (fn.coeffs.empty()) out << " 0";
          } else if constexpr (std::is_same_v<T, AffineFn>) {
            out << ' ' << format_number(fn.slope) << ' ' << format_number(fn.intercept);
          } else if constexpr (std::is_same_v<T, PowerFn>) {
            out << ' ' << format_number(fn.scale) << ' ' << format_number(fn.slope) << ' '
                << format_number(fn.shift) << ' ' << fn.exponent;
          } else {
            out << ' ' << format_number(fn.scale) << ' ' << format_number(fn.slope) << ' '
                << format_number(fn.shift);
          }
        },
        term.fn);
    out << '\n';
  }
  for (const auto& seg : model.segments) {
    out << "segment: " << seg.label;
    for (const auto& name : seg.members) out << ' ' << name;
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// DAG models

DagModel parse_dag(std::string_view text) {
  DagModel dag;
  for (const auto& d : directives(text)) {
    if (d.key == "nodes") {
      dag.nodes.insert(dag.nodes.end(), d.args.begin(), d.args.end());
    } else if (d.key == "sink") {
      require_args(d, 1);
      dag.sink = d.args[0];
    } else if (d.key == "start") {
      require_args(d, 2);
      dag.starts.push_back({d.args[0], d.args[1]});
    } else if (d.key == "edge") {
      require_args(d, 3);
      dag.edges.push_back({d.args[0], d.args[1], d.args[2]});
    } else {
      fail(d, "unknown directive");
    }
  }
  return dag;
}

ModelSpec compile_dag(const DagModel& dag, std::size_t path_cap) {
  std::map<std::string, std::size_t> node_index;
  for (const auto& node : dag.nodes) {
    if (!node_index.emplace(node, node_index.size()).second) {
      throw InputError("duplicate node '" + node + "'");
    }
  }
  auto node_of = [&](const std::string& name) {
    auto it = node_index.find(name);
    if (it == node_index.end()) throw InputError("unknown node '" + name + "'");
    return it->second;
  };
  const std::size_t sink = node_of(dag.sink);

  ModelSpec model;
  std::set<std::string> seen_vars;
  auto declare = [&](const std::string& var) {
    if (!seen_vars.insert(var).second) throw InputError("variable '" + var + "' used twice");
    model.names.push_back(var);
    return model.names.size() - 1;
  };
  std::vector<std::pair<std::size_t, Index>> starts;
  for (const auto& st : dag.starts) {
    const std::size_t node = node_of(st.node);
    starts.emplace_back(node, declare(st.var));
  }
  struct Arc {
    std::size_t to;
    Index var;
  };
  std::vector<std::vector<Arc>> out_arcs(dag.nodes.size());
  for (const auto& e : dag.edges) {
    const std::size_t from = node_of(e.from);
    const std::size_t to = node_of(e.to);
    out_arcs[from].push_back({to, declare(e.var)});
  }

  // Cycle detection (iterative colouring DFS).
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(dag.nodes.size(), Mark::White);
  for (std::size_t root = 0; root < dag.nodes.size(); ++root) {
    if (mark[root] != Mark::White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < out_arcs[node].size()) {
        const std::size_t to = out_arcs[node][next++].to;
        if (mark[to] == Mark::Grey) {
          throw InputError("graph has a cycle through node '" + dag.nodes[to] + "'");
        }
        if (mark[to] == Mark::White) {
          mark[to] = Mark::Grey;
          stack.emplace_back(to, 0);
        }
      } else {
        mark[node] = Mark::Black;
        stack.pop_back();
      }
    }
  }

  // Which nodes reach the sink.
  std::vector<int> reaches(dag.nodes.size(), -1);
  std::function<bool(std::size_t)> can_reach = [&](std::size_t node) -> bool {
    if (reaches[node] >= 0) return reaches[node] == 1;
    bool ok = node == sink;
    for (const auto& arc : out_arcs[node]) ok = can_reach(arc.to) || ok;
    reaches[node] = ok ? 1 : 0;
    return ok;
  };
  for (const auto& [node, var] : starts) {
    if (!can_reach(node)) {
      throw InputError("sink is not reachable from start node '" + dag.nodes[node] + "'");
    }
  }

  model.f = CharacteristicFunction(model.names.size());
  std::size_t paths = 0;
  Subset current;
  std::function<void(std::size_t)> walk = [&](std::size_t node) {
    if (node == sink) {
      if (++paths > path_cap) {
        throw InputError("more than " + std::to_string(path_cap) + " start-to-sink paths");
      }
      model.f.add_term(current, 1.0);
      return;
    }
    for (const auto& arc : out_arcs[node]) {
      if (reaches[arc.to] != 1 && !can_reach(arc.to)) continue;
      current.push_back(arc.var);
      walk(arc.to);
      current.pop_back();
    }
  };
  for (const auto& [node, var] : starts) {
    current.assign(1, var);
    walk(node);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Value snapshots

std::vector<ValueSnapshot> parse_snapshots(std::string_view csv,
                                           const std::vector<std::string>& names) {
  struct Pending {
    std::string entity;
    std::vector<double> r;
    std::vector<double> s;
    std::vector<bool> seen;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t> by_entity;
  std::map<std::string, Index> var_index;
  for (Index i = 0; i < names.size(); ++i) var_index[names[i]] = i;

  std::size_t line_no = 0;
  bool first_row = true;
  while (!csv.empty()) {
    const auto eol = csv.find('\n');
    std::string_view line = trim(csv.substr(0, eol));
    csv = eol == std::string_view::npos ? std::string_view{} : csv.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(trim(line.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    const std::string where = "values line " + std::to_string(line_no) + ": ";
    if (fields.size() != 4) throw InputError(where + "expected entity,variable,initial,final");
    if (first_row && fields[0] == "entity") {
      first_row = false;
      continue;
    }
    first_row = false;
    const auto var_it = var_index.find(std::string(fields[1]));
    if (var_it == var_index.end()) {
      throw InputError(where + "unknown variable '" + std::string(fields[1]) + "'");
    }
    auto [it, inserted] = by_entity.try_emplace(std::string(fields[0]), pending.size());
    if (inserted) {
      pending.push_back({std::string(fields[0]), std::vector<double>(names.size()),
                         std::vector<double>(names.size()), std::vector<bool>(names.size())});
    }
    Pending& p = pending[it->second];
    const Index i = var_it->second;
    if (p.seen[i]) {
      throw InputError(where + "variable '" + names[i] + "' given twice for entity '" +
                       p.entity + "'");
    }
    try {
      p.r[i] = parse_number(fields[2]);
      p.s[i] = parse_number(fields[3]);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
    p.seen[i] = true;
  }

  std::vector<ValueSnapshot> out;
  for (auto& p : pending) {
    for (Index i = 0; i < names.size(); ++i) {
      if (!p.seen[i]) {
        throw InputError("entity '" + p.entity + "' has no values for '" + names[i] + "'");
      }
    }
    try {
      out.push_back({p.entity, ValuePair(std::move(p.r), std::move(p.s))});
    } catch (const std::exception& e) {
      throw InputError("entity '" + p.entity + "': " + e.what());
    }
  }
  if (out.empty()) throw InputError("values file has no rows");
  return out;
}

// ---------------------------------------------------------------------------
// Presets

namespace presets {

ModelSpec procurement() {
  ModelSpec m;
  m.names = {"a", "p", "c"};
  m.f = CharacteristicFunction(3);
  m.f.add_term({0, 1, 2}, 1.0);
  return m;
}

ModelSpec spend(std::size_t positions) {
  if (positions == 0) throw InputError("spend model needs at least one position");
  ModelSpec m;
  m.names = {"q", "b"};
  for (std::size_t i = 1; i <= positions; ++i) {
    const auto k = std::to_string(i);
    m.names.insert(m.names.end(), {"p" + k, "ctr" + k, "cpc" + k});
    m.segments.push_back({"position" + k, {"p" + k, "ctr" + k, "cpc" + k}});
  }
  m.f = CharacteristicFunction(m.names.size());
  for (std::size_t i = 0; i < positions; ++i) {
    const Index base = 2 + 3 * i;
    m.f.add_term({0, 1, base, base + 1, base + 2}, 1.0);
  }
  return m;
}

ModelSpec portfolio(std::size_t assets) {
  if (assets == 0) throw InputError("portfolio needs at least one asset");
  ModelSpec m;
  Segment allocation{"allocation", {}};
  Segment selection{"selection", {}};
  for (std::size_t i = 1; i <= assets; ++i) {
    const auto k = std::to_string(i);
    m.names.insert(m.names.end(), {"w" + k, "r" + k});
    allocation.members.push_back("w" + k);
    selection.members.push_back("r" + k);
  }
  m.f = CharacteristicFunction(m.names.size());
  for (std::size_t i = 0; i < assets; ++i) m.f.add_term({2 * i, 2 * i + 1}, 1.0);
  m.segments = {allocation, selection};
  return m;
}

ModelSpec basketball(std::size_t players) {
  if (players == 0) throw InputError("basketball model needs at least one player");
  ModelSpec m;
  for (std::size_t i = 1; i <= players; ++i) {
    const auto k = std::to_string(i);
    const std::vector<std::string> vars{"games" + k, "minutes" + k, "attempts" + k, "pct" + k};
    m.names.insert(m.names.end(), vars.begin(), vars.end());
    m.segments.push_back({"player" + k, vars});
  }
  m.f = CharacteristicFunction(m.names.size());
  // Field goal percentage stays in 0-100 units; the 1/100 lives in the coefficient.
  for (std::size_t i = 0; i < players; ++i) {
    m.f.add_term({4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3}, 1.0 / 100.0);
  }
  return m;
}

ModelSpec segmented_spend() {
  ModelSpec m;
  m.names = {"cpc_search", "clicks_search", "cpc_content", "clicks_content"};
  m.f = CharacteristicFunction(4);
  m.f.add_term({0, 1}, 1.0);
  m.f.add_term({2, 3}, 1.0);
  m.segments = {{"cpc", {"cpc_search", "cpc_content"}},
                {"clicks", {"clicks_search", "clicks_content"}}};
  return m;
}

ModelSpec by_name(std::string_view name, std::size_t size) {
  if (name == "procurement") return procurement();
  if (name == "spend") return spend(size == 0 ? 4 : size);
  if (name == "portfolio") return portfolio(size == 0 ? 1 : size);
  if (name == "basketball") return basketball(size == 0 ? 5 : size);
  if (name == "segmented-spend") return segmented_spend();
  throw InputError("unknown preset '" + std::string(name) + "'");
}

}  // namespace presets

}  // namespace attrib
