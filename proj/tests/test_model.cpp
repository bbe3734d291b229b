#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "attrib/exact.hpp"
#include "attrib/model.hpp"
#include "attrib/report.hpp"

using namespace attrib;

namespace {

const char* kProcurementModel = R"(# spend = amount * price * conversion
variables: a p c
term: 1 a p c
segment: volume a
segment: price p c
)";

const char* kProcurementValues = R"(entity,variable,initial,final
acme,a,4,5
acme,p,1,12
acme,c,1,1.5
)";

ValueSnapshot snapshot(const ModelSpec& m, std::vector<double> r, std::vector<double> s) {
  (void)m;
  return {"x", ValuePair(std::move(r), std::move(s))};
}

}  // namespace

TEST_CASE("parse_model") {
  const auto m = parse_model(kProcurementModel);
  CHECK(m.names == std::vector<std::string>{"a", "p", "c"});
  CHECK(m.f.multilinear().coefficient({0, 1, 2}) == 1.0);
  CHECK(m.segments.size() == 2);
  CHECK(m.index_of("c") == 2);
  CHECK_THROWS_AS(m.index_of("z"), InputError);

  const auto sep = parse_model(
      "variables: x y\nterm: 2.5 x y\nterm: -1\nseparable: x log 1 1 0\n"
      "separable: y pow 2 1 3 -2\nseparable: y poly 1 2 3\n");
  CHECK(sep.f.separable().size() == 3);
  CHECK(sep.f.evaluate(std::vector{1.0, 0.0}) == doctest::Approx(-1.0 + 2.0 / 9.0 + 1.0));

  CHECK_THROWS_AS(parse_model("term: 1 a\n"), InputError);
  CHECK_THROWS_AS(parse_model("variables: a\nterm: 1 b\n"), InputError);
  CHECK_THROWS_AS(parse_model("variables: a\nterm: x a\n"), InputError);
  CHECK_THROWS_AS(parse_model("variables: a\nbogus line\n"), InputError);
  CHECK_THROWS_AS(parse_model("variables: a\nseparable: a sin 1\n"), InputError);
  CHECK_THROWS_AS(parse_model("variables: a a\n"), InputError);
}

TEST_CASE("model files round-trip bit for bit") {
  for (const auto& m : {presets::procurement(), presets::spend(4), presets::portfolio(7),
                        presets::basketball(5), presets::segmented_spend(),
                        parse_model(kProcurementModel)}) {
    CHECK(parse_model(format_model(m)) == m);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-1e6, 1e6);
  CharacteristicFunction f(3);
  for (int k = 0; k < 20; ++k) f.add_term({static_cast<Index>(k % 3)}, c(rng) / 3.0);
  f.add_separable(1, ExpFn{c(rng), 1.0 / 7.0, 0.1});
  ModelSpec m{{"u", "v", "w"}, f, {}};
  CHECK(parse_model(format_model(m)) == m);
}

TEST_CASE("number formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK_THROWS_AS(parse_number("1.5x"), InputError);
  CHECK_THROWS_AS(parse_number(""), InputError);
}

TEST_CASE("dag compilation") {
  const auto dag = parse_dag(
      "nodes: a b t\nsink: t\nstart: a qa\nstart: b qb\n"
      "edge: a b ab\nedge: a t at\nedge: b t bt\n");
  const auto m = compile_dag(dag);
  CHECK(m.names == std::vector<std::string>{"qa", "qb", "ab", "at", "bt"});
  // qa*ab*bt + qa*at + qb*bt
  CHECK(m.f.multilinear().term_count() == 3);
  CHECK(m.f.multilinear().coefficient({0, 2, 4}) == 1.0);
  CHECK(m.f.multilinear().coefficient({0, 3}) == 1.0);
  CHECK(m.f.multilinear().coefficient({1, 4}) == 1.0);

  const auto single = compile_dag(parse_dag("nodes: a t\nsink: t\nstart: a s_a\nedge: a t p\n"));
  CHECK(single.f.multilinear().term_count() == 1);
  CHECK(single.f.multilinear().coefficient({0, 1}) == 1.0);

  const auto at_sink = compile_dag(parse_dag("nodes: t\nsink: t\nstart: t q\n"));
  CHECK(at_sink.f.multilinear().coefficient({0}) == 1.0);

  CHECK_THROWS_AS(compile_dag(parse_dag("nodes: a b t\nsink: t\nstart: a q\nedge: a b x\n"
                                        "edge: b a y\nedge: b t z\n")),
                  InputError);
  CHECK_THROWS_AS(compile_dag(parse_dag("nodes: a t\nsink: t\nstart: a q\n")), InputError);
  CHECK_THROWS_AS(compile_dag(parse_dag("nodes: a t\nsink: t\nstart: a q\nedge: a t q\n")),
                  InputError);
  CHECK_THROWS_AS(compile_dag(parse_dag("nodes: a t\nsink: t\nedge: a z x\n")), InputError);
}

TEST_CASE("property: compiled DAGs match a DFS path enumeration") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    // Nodes 0..k-1 in topological order, sink is k-1.
    const std::size_t k = 2 + rng() % 5;
    std::string text = "nodes:";
    for (std::size_t v = 0; v < k; ++v) text += " n" + std::to_string(v);
    text += "\nsink: n" + std::to_string(k - 1) + "\n";
    std::vector<std::tuple<std::size_t, std::size_t, std::string>> edges;
    for (std::size_t v = 0; v + 1 < k; ++v) {
      edges.emplace_back(v, v + 1, "e" + std::to_string(edges.size()));
    }
    while (edges.size() < 12 && rng() % 3 != 0) {
      std::size_t a = rng() % k, b = rng() % k;
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b, "e" + std::to_string(edges.size()));
    }
    std::vector<std::pair<std::size_t, std::string>> starts;
    for (std::size_t v = 0; v < k; ++v) {
      if (v == 0 || rng() % 2) starts.emplace_back(v, "s" + std::to_string(v));
    }
    for (const auto& [v, var] : starts) text += "start: n" + std::to_string(v) + " " + var + "\n";
    for (const auto& [a, b, var] : edges) {
      text += "edge: n" + std::to_string(a) + " n" + std::to_string(b) + " " + var + "\n";
    }
    const auto m = compile_dag(parse_dag(text));

    std::map<std::string, double> x;
    std::vector<double> point;
    for (const auto& name : m.names) {
      x[name] = val(rng);
      point.push_back(x[name]);
    }
    // Depth-first enumeration of every start-to-sink path.
    std::function<double(std::size_t)> paths_from = [&](std::size_t v) {
      if (v == k - 1) return 1.0;
      double total = 0.0;
      for (const auto& [a, b, var] : edges) {
        if (a == v) total += x[var] * paths_from(b);
      }
      return total;
    };
    double expected = 0.0;
    for (const auto& [v, var] : starts) expected += x[var] * paths_from(v);
    CHECK(std::abs(m.f.evaluate(point) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("dag path cap") {
  std::string text = "nodes:";
  for (int v = 0; v <= 12; ++v) text += " n" + std::to_string(v);
  text += "\nsink: n12\nstart: n0 q\n";
  for (int v = 0; v < 12; ++v) {
    text += "edge: n" + std::to_string(v) + " n" + std::to_string(v + 1) + " a" +
            std::to_string(v) + "\n";
    text += "edge: n" + std::to_string(v) + " n" + std::to_string(v + 1) + " b" +
            std::to_string(v) + "\n";
  }
  const auto dag = parse_dag(text);
  CHECK(compile_dag(dag).f.multilinear().term_count() == 4096);
  CHECK_THROWS_AS(compile_dag(dag, 1000), InputError);
}

TEST_CASE("snapshots") {
  const std::vector<std::string> names{"a", "p", "c"};
  const auto snaps = parse_snapshots(kProcurementValues, names);
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].entity == "acme");
  CHECK(snaps[0].values.s == std::vector{5.0, 12.0, 1.5});

  const auto two = parse_snapshots("# comment\nx,a,1,2\ny,a,3,4\nx,p,1,1\nx,c,1,1\n"
                                   "y,c,0,0\ny,p,2,2\n",
                                   names);
  REQUIRE(two.size() == 2);
  CHECK(two[1].entity == "y");
  CHECK(two[1].values.r == std::vector{3.0, 2.0, 0.0});

  CHECK_THROWS_AS(parse_snapshots("x,a,1,2\n", names), InputError);
  CHECK_THROWS_AS(parse_snapshots("x,a,1,2\nx,a,1,2\nx,p,1,1\nx,c,1,1\n", names), InputError);
  CHECK_THROWS_AS(parse_snapshots("x,a,1,2\nx,p,1,1\nx,c,1,nan\n", names), InputError);
  CHECK_THROWS_AS(parse_snapshots("x,a,1,2\nx,p,1,1\nx,q,1,1\n", names), InputError);
  CHECK_THROWS_AS(parse_snapshots("x,a,1\n", names), InputError);
  CHECK_THROWS_AS(parse_snapshots("", names), InputError);
}

TEST_CASE("reports on the procurement example") {
  const auto m = parse_model(kProcurementModel);
  const auto snap = parse_snapshots(kProcurementValues, m.names)[0];

  const auto ass = run_report(m, snap, "ass");
  CHECK(ass.z[1] == doctest::Approx(374.0 / 6).epsilon(1e-14));
  CHECK(ass.change == 86.0);
  CHECK(std::abs(ass.residual) <= 1e-12);
  REQUIRE(ass.segments.size() == 2);
  CHECK(ass.segments[0].attribution == ass.z[0]);
  CHECK(ass.segments[1].attribution == ass.z[1] + ass.z[2]);

  const auto naive = run_report(m, snap, "naive");
  CHECK(naive.residual == 44.5);

  for (const char* id : {"ss-brute", "as-numeric"}) {
    const auto r = run_report(m, snap, id);
    for (Index i = 0; i < 3; ++i) CHECK(r.z[i] == doctest::Approx(ass.z[i]).epsilon(1e-9));
  }

  std::ostringstream text;
  write_text(text, ass);
  CHECK(text.str().find("residual") != std::string::npos);
  CHECK(text.str().find("62.3333333333") != std::string::npos);

  std::ostringstream machine;
  write_machine(machine, ass);
  std::istringstream lines(machine.str());
  std::string line;
  int records = 0;
  bool saw_summary = false;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    ++records;
    if (j.contains("residual")) saw_summary = true;
  }
  CHECK(records == 3 + 2 + 1);
  CHECK(saw_summary);

  CHECK_THROWS(run_report(m, snap, "mystery"));
}

TEST_CASE("random-order weight files") {
  const auto m = parse_model(kProcurementModel);
  const auto snap = parse_snapshots(kProcurementValues, m.names)[0];
  const std::string path = "attrib_test_weights.csv";
  {
    std::ofstream out(path);
    out << "0.5,a,p,c\n0.5,c,p,a\n";
  }
  const auto r = run_report(m, snap, "random-order:" + path);
  CHECK(std::abs(r.residual) <= 1e-12);
  // a first: 1*1*1 = 1; a last: 1*(5*12*1.5 - 4*12*1.5) = 18
  CHECK(r.z[0] == doctest::Approx(9.5));
  std::remove(path.c_str());
}

TEST_CASE("domain errors name the variable") {
  auto m = parse_model("variables: x y\nterm: 1 x y\nseparable: y log 1 1 0\n");
  try {
    run_report(m, snapshot(m, {1.0, -1.0}, {2.0, 2.0}), "ass");
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find('y') != std::string::npos);
  }
}

TEST_CASE("portfolio identity") {
  const auto m = presets::portfolio(1);
  const auto r = run_report(m, snapshot(m, {0.6, 0.05}, {0.5, 0.08}), "ass");
  CHECK(r.z[m.index_of("w1")] == doctest::Approx(-0.0065).epsilon(1e-12));
  CHECK(r.z[m.index_of("r1")] == doctest::Approx(0.0165).epsilon(1e-12));
}

TEST_CASE("basketball preset uses percentages") {
  const auto m = presets::basketball(1);
  CHECK(m.f.evaluate(std::vector{10.0, 30.0, 0.5, 40.0}) == doctest::Approx(60.0));
}

TEST_CASE("mix effects demonstration") {
  const auto rep = mix_effects_demo();
  CHECK(rep.search_cpc_attribution == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rep.content_cpc_attribution == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(rep.aggregated_cpc_attribution == doctest::Approx(150.5).epsilon(1e-12));
  CHECK(rep.overall_cpc_initial == doctest::Approx(0.505));
  CHECK(std::round(rep.overall_cpc_final * 1e4) / 1e4 == doctest::Approx(0.0396));
  CHECK(rep.aggregate_first_cpc_attribution ==
        doctest::Approx(-2396.789603960396).epsilon(1e-12));
  CHECK(rep.aggregated_cpc_attribution * rep.aggregate_first_cpc_attribution < 0);
  std::ostringstream out;
  write_text(out, rep);
  CHECK_FALSE(out.str().empty());
}
