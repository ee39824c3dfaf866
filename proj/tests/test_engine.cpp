#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mwvc/engine.hpp"

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

using namespace mwvc;
using ordered_json = nlohmann::ordered_json;

namespace {

WeightedGraph k2_unit() { return parse_graph("p wvc 2 1\nv 0 1\nv 1 1\ne 0 1\n"); }

WeightedGraph p3_unit() {
  return parse_graph("p wvc 3 2\nv 0 1\nv 1 1\nv 2 1\ne 0 1\ne 1 2\n");
}

WeightedGraph k4_pow2() {
  return parse_graph(
      "p wvc 4 6\nv 0 1\nv 1 2\nv 2 4\nv 3 8\n"
      "e 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n");
}

RunConfig half_config(const Rat& epsilon) {
  RunConfig cfg;
  cfg.epsilon = epsilon;
  cfg.gamma_mode = GammaMode::Half;
  return cfg;
}

}  // namespace

TEST_CASE("config resolution per gamma mode") {
  WeightedGraph k2 = k2_unit();

  ResolvedConfig r = resolve_config(k2, half_config(Rat(1)));
  CHECK_EQ(r.params.epsilon_prime, Rat(1, 3));
  CHECK_EQ(r.params.gamma, Rat(1, 2));
  CHECK_EQ(r.params.z, 2);
  CHECK_EQ(r.analysis_K, Rat(2));
  CHECK_EQ(r.bound_max, 8);
  CHECK_EQ(r.iteration_cap, 80);

  RunConfig cfg;
  cfg.epsilon = Rat(1);

  cfg.gamma_mode = GammaMode::AutoDelta;
  CHECK_EQ(resolve_config(k2, cfg).params.gamma, Rat(1, 2));  // small max degree
  GenSpec star;
  star.family = GraphFamily::Star;
  star.delta = 1 << 16;
  WeightedGraph big_star = generate_graph(star);
  CHECK_EQ(resolve_config(big_star, cfg).params.gamma, Rat(1, 4));
  CHECK_EQ(resolve_config(big_star, cfg).analysis_K, Rat(2));

  cfg.gamma_mode = GammaMode::EpsPower;
  cfg.epsilon = Rat(1, 16);
  cfg.eps_power_q = 1;
  CHECK_EQ(resolve_config(k2, cfg).params.gamma, Rat(1, 4));
  cfg.eps_power_q = 2;
  CHECK_EQ(resolve_config(k2, cfg).params.gamma, Rat(1, 2));

  cfg.gamma_mode = GammaMode::BcsBaseline;
  cfg.epsilon = Rat(1);
  CHECK_EQ(resolve_config(k2, cfg).params.gamma, Rat(1, 3));
  CHECK_EQ(resolve_config(k2, cfg).params.z, 1);

  cfg.gamma_mode = GammaMode::Fixed;
  cfg.epsilon = Rat(2, 99);  // epsilon' = 1/100
  cfg.gamma_fixed = Rat(3, 10);
  CHECK_EQ(resolve_config(k2, cfg).params.epsilon_prime, Rat(1, 100));
  CHECK_EQ(resolve_config(k2, cfg).params.z, 4);

  cfg.gamma_mode = GammaMode::Half;
  cfg.epsilon = Rat(0);
  CHECK_THROWS_AS(resolve_config(k2, cfg), std::invalid_argument);
  cfg.epsilon = Rat(1);
  cfg.gamma_mode = GammaMode::Fixed;
  cfg.gamma_fixed = Rat(1);
  CHECK_THROWS_AS(resolve_config(k2, cfg), std::invalid_argument);
  cfg.gamma_mode = GammaMode::EpsPower;
  cfg.eps_power_q = 0;
  CHECK_THROWS_AS(resolve_config(k2, cfg), std::invalid_argument);
  cfg = half_config(Rat(1));
  cfg.analysis_K = Rat(1);
  CHECK_THROWS_AS(resolve_config(k2, cfg), std::invalid_argument);
  cfg = half_config(Rat(1));
  cfg.iteration_cap = 0;
  CHECK_THROWS_AS(resolve_config(k2, cfg), std::invalid_argument);
}

TEST_CASE("default analysis constant") {
  CHECK_EQ(default_analysis_K(Int(1)), Rat(2));
  CHECK_EQ(default_analysis_K(Int(16)), Rat(2));
  CHECK_EQ(default_analysis_K(Int(17)), Rat(2));
  CHECK_EQ(default_analysis_K(Int(1) << 16), Rat(2));
  CHECK_EQ(default_analysis_K(Int(1) << 64), Rat(2));
}

TEST_CASE("gamma mode names round-trip") {
  int q = 0;
  CHECK_EQ(gamma_mode_name(GammaMode::AutoDelta, 1), "auto");
  CHECK_EQ(gamma_mode_name(GammaMode::EpsPower, 3), "eps-power:3");
  for (const char* name : {"auto", "half", "bcs", "fixed", "eps-power:2"}) {
    GammaMode m = parse_gamma_mode(name, q);
    CHECK_EQ(gamma_mode_name(m, q), name);
  }
  CHECK_THROWS_AS(parse_gamma_mode("eps-power:", q), std::invalid_argument);
  CHECK_THROWS_AS(parse_gamma_mode("eps-power:x", q), std::invalid_argument);
  CHECK_THROWS_AS(parse_gamma_mode("halff", q), std::invalid_argument);
}

TEST_CASE("two mutually offering vertices settle in one iteration") {
  RunConfig cfg = half_config(Rat(1));
  cfg.record_trace = true;
  RunResult res = run(k2_unit(), cfg);

  CHECK_EQ(res.cover, std::vector<int>{0, 1});
  CHECK_EQ(res.statuses[0], VertexStatus::InCover);
  CHECK_EQ(res.final_weights, std::vector<Rat>{Rat(0), Rat(0)});
  CHECK_EQ(res.levels, std::vector<long>{1, 1});
  CHECK_EQ(res.iterations, std::vector<long long>{1, 1});
  CHECK_EQ(res.cover_weight, Rat(2));
  CHECK_EQ(res.dual.at(EdgeId{0, 1}), Rat(1));
  CHECK_EQ(res.dual_sum, Rat(1));
  CHECK_EQ(res.metrics.max_iterations, 1);
  CHECK_EQ(res.metrics.rounds, 4);
  CHECK_EQ(res.metrics.messages.level, 2);
  CHECK_EQ(res.metrics.messages.request, 2);
  CHECK_EQ(res.metrics.messages.budget, 2);
  CHECK_EQ(res.metrics.messages.cover, 2);
  CHECK_EQ(res.metrics.messages.total(), 8);
  CHECK_EQ(res.metrics.max_payload_bits, 3);  // "1/2" = 1 + 2 bits
  CHECK_EQ(res.metrics.max_active_level, 1);
  CHECK_EQ(res.metrics.claim1_checks, 2);
  CHECK_EQ(res.metrics.dichotomy_checks, 0);
}

TEST_CASE("trace of the two-vertex run, record by record") {
  RunConfig cfg = half_config(Rat(1));
  cfg.record_trace = true;
  RunResult res = run(k2_unit(), cfg);

  const std::vector<std::string> expected = {
      R"({"type":"message","iteration":0,"phase":"A","sender":0,"receiver":1,"variant":"level","level":1})",
      R"({"type":"message","iteration":0,"phase":"A","sender":1,"receiver":0,"variant":"level","level":1})",
      R"({"type":"message","iteration":0,"phase":"B","sender":0,"receiver":1,"variant":"request","amount":"1/2"})",
      R"({"type":"message","iteration":0,"phase":"B","sender":1,"receiver":0,"variant":"request","amount":"1/2"})",
      R"({"type":"message","iteration":0,"phase":"C","sender":0,"receiver":1,"variant":"budget","amount":"1/2"})",
      R"({"type":"delta","iteration":0,"phase":"C","edge":[0,1],"value":"1/2"})",
      R"({"type":"message","iteration":0,"phase":"C","sender":1,"receiver":0,"variant":"budget","amount":"1/2"})",
      R"({"type":"delta","iteration":0,"phase":"C","edge":[0,1],"value":"1/1"})",
      R"({"type":"state","iteration":0,"phase":"D","vertex":0,"w":"0/1","level":1,"status":"in_cover","iterations":1})",
      R"({"type":"message","iteration":0,"phase":"D","sender":0,"receiver":1,"variant":"cover"})",
      R"({"type":"state","iteration":0,"phase":"D","vertex":1,"w":"0/1","level":1,"status":"in_cover","iterations":1})",
      R"({"type":"message","iteration":0,"phase":"D","sender":1,"receiver":0,"variant":"cover"})",
  };
  REQUIRE_EQ(res.trace.size(), expected.size() + 1);

  ordered_json header = ordered_json::parse(res.trace[0]);
  CHECK_EQ(header["type"], "header");
  CHECK_EQ(header["format"], "mwvc-trace-v1");
  CHECK_EQ(header["graph"], "p wvc 2 1\nv 0 1\nv 1 1\ne 0 1\n");
  CHECK_EQ(header["epsilon"], "1/1");
  CHECK_EQ(header["epsilon_prime"], "1/3");
  CHECK_EQ(header["gamma_mode"], "half");
  CHECK_EQ(header["gamma"], "1/2");
  CHECK_EQ(header["z"], 2);
  CHECK_EQ(header["analysis_K"], "2/1");
  CHECK_EQ(header["iteration_cap"], 80);

  for (size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(i);
    CHECK_EQ(res.trace[i + 1], expected[i]);
  }
}

TEST_CASE("path of three: partial weights, level jump, quiet retirement") {
  RunResult res = run(p3_unit(), half_config(Rat(1)));

  CHECK_EQ(res.cover, std::vector<int>{0, 1});
  CHECK_EQ(res.statuses[2], VertexStatus::NotInCover);
  CHECK_EQ(res.final_weights, std::vector<Rat>{Rat(1, 4), Rat(0), Rat(3, 4)});
  CHECK_EQ(res.levels, std::vector<long>{3, 1, 1});  // 1/4 sits under gamma^2
  CHECK_EQ(res.iterations, std::vector<long long>{1, 1, 1});
  CHECK_EQ(res.cover_weight, Rat(2));
  CHECK_EQ(res.dual.at(EdgeId{0, 1}), Rat(3, 4));
  CHECK_EQ(res.dual.at(EdgeId{1, 2}), Rat(1, 4));
  CHECK_EQ(res.dual_sum, Rat(1));
  CHECK_EQ(res.metrics.rounds, 4);
  CHECK_EQ(res.metrics.messages.level, 4);
  CHECK_EQ(res.metrics.messages.request, 4);
  CHECK_EQ(res.metrics.messages.budget, 4);
  CHECK_EQ(res.metrics.messages.cover, 3);
  CHECK_EQ(res.metrics.max_payload_bits, 4);  // "1/4" = 1 + 3 bits
  CHECK_EQ(res.metrics.claim1_checks, 4);     // 3 at iteration 0, 1 at iteration 1
  CHECK_EQ(res.metrics.max_active_level, 1);
}

TEST_CASE("doubling-weight clique needs a second iteration") {
  RunConfig cfg = half_config(Rat(1, 8));
  cfg.record_trace = true;
  RunResult res = run(k4_pow2(), cfg);

  CHECK_EQ(res.config.params.epsilon_prime, Rat(1, 17));
  CHECK_EQ(res.config.params.z, 5);
  CHECK_EQ(res.config.bound_max, 30);  // 5 * (4 + ceil_log_up(2, 3))

  CHECK_EQ(res.cover, std::vector<int>{0, 1, 2});
  CHECK_EQ(res.statuses[3], VertexStatus::NotInCover);
  CHECK_EQ(res.final_weights, std::vector<Rat>{Rat(0), Rat(0), Rat(0), Rat(14, 3)});
  CHECK_EQ(res.levels, std::vector<long>{1, 1, 3, 1});
  CHECK_EQ(res.iterations, std::vector<long long>{1, 1, 2, 2});
  CHECK_EQ(res.cover_weight, Rat(7));

  CHECK_EQ(res.dual.at(EdgeId{0, 1}), Rat(1, 2));
  CHECK_EQ(res.dual.at(EdgeId{0, 2}), Rat(1, 3));
  CHECK_EQ(res.dual.at(EdgeId{0, 3}), Rat(1, 6));
  CHECK_EQ(res.dual.at(EdgeId{1, 2}), Rat(1));
  CHECK_EQ(res.dual.at(EdgeId{1, 3}), Rat(1, 2));
  CHECK_EQ(res.dual.at(EdgeId{2, 3}), Rat(8, 3));
  CHECK_EQ(res.dual_sum, Rat(31, 6));

  CHECK_EQ(res.metrics.max_iterations, 2);
  CHECK_EQ(res.metrics.rounds, 8);
  CHECK_EQ(res.metrics.messages.level, 14);
  CHECK_EQ(res.metrics.messages.request, 14);
  CHECK_EQ(res.metrics.messages.budget, 14);
  CHECK_EQ(res.metrics.messages.cover, 7);
  CHECK_EQ(res.metrics.max_payload_bits, 5);  // "4/3" = 3 + 2 bits
  CHECK_EQ(res.metrics.claim1_checks, 7);
  CHECK_EQ(res.metrics.max_active_level, 3);

  // accounting identity: what a vertex lost went into its incident edges
  for (int v = 0; v < 4; ++v) {
    Rat incident;
    for (const auto& [e, val] : res.dual)
      if (e.u == v || e.v == v) incident += val;
    CHECK_EQ(Rat(k4_pow2().weights[v]) - incident, res.final_weights[v]);
  }
}

TEST_CASE("vertex with no neighbors retires in its first iteration") {
  WeightedGraph g = parse_graph("p wvc 1 0\nv 0 7\n");
  RunConfig cfg = half_config(Rat(1));
  cfg.record_trace = true;
  RunResult res = run(g, cfg);

  CHECK_EQ(res.cover, std::vector<int>{});
  CHECK_EQ(res.statuses[0], VertexStatus::NotInCover);
  CHECK_EQ(res.final_weights[0], Rat(7));
  CHECK_EQ(res.iterations, std::vector<long long>{1});
  CHECK_EQ(res.metrics.rounds, 4);
  CHECK_EQ(res.metrics.messages.total(), 0);
  CHECK_EQ(res.metrics.claim1_checks, 1);
  REQUIRE_EQ(res.trace.size(), 2);
  CHECK_EQ(res.trace[1],
           R"({"type":"state","iteration":0,"phase":"A","vertex":0,"w":"7/1","level":1,"status":"not_in_cover","iterations":1})");
}

TEST_CASE("empty graph terminates immediately") {
  WeightedGraph g = parse_graph("p wvc 0 0\n");
  RunConfig cfg = half_config(Rat(1));
  cfg.record_trace = true;
  RunResult res = run(g, cfg);
  CHECK_EQ(res.cover.size(), 0);
  CHECK_EQ(res.metrics.rounds, 0);
  CHECK_EQ(res.metrics.messages.total(), 0);
  CHECK_EQ(res.trace.size(), 1);  // header only
}

TEST_CASE("disconnected pieces settle independently") {
  WeightedGraph g = parse_graph("p wvc 3 1\nv 0 1\nv 1 1\nv 2 5\ne 0 1\n");
  RunResult res = run(g, half_config(Rat(1)));
  CHECK_EQ(res.cover, std::vector<int>{0, 1});
  CHECK_EQ(res.statuses[2], VertexStatus::NotInCover);
  CHECK_EQ(res.iterations, std::vector<long long>{1, 1, 1});
  CHECK_EQ(res.metrics.rounds, 4);
}

TEST_CASE("iteration cap is a hard error, one past the true need") {
  WeightedGraph g = k4_pow2();  // needs 3 scheduler passes (last one settles vertex 3)
  RunConfig cfg = half_config(Rat(1, 8));
  cfg.iteration_cap = 2;
  CHECK_THROWS_AS(run(g, cfg), SimulationError);
  cfg.iteration_cap = 3;
  CHECK_EQ(run(g, cfg).metrics.max_iterations, 2);
}

TEST_CASE("runs are deterministic and parallel equals sequential") {
  GenSpec spec;
  spec.family = GraphFamily::Gnp;
  spec.n = 60;
  spec.p = Rat(3, 10);
  spec.weights = WeightRule::UniformInt;
  spec.w_max = 9;
  spec.seed = 42;
  WeightedGraph g = generate_graph(spec);

  RunConfig cfg = half_config(Rat(1, 2));
  cfg.record_trace = true;
  RunResult a = run(g, cfg);
  RunResult b = run(g, cfg);
  CHECK_EQ(a.trace, b.trace);
  CHECK_EQ(a.final_weights, b.final_weights);
  CHECK_EQ(a.dual, b.dual);

  cfg.threads = 4;
  RunResult c = run(g, cfg);
  CHECK_EQ(a.trace, c.trace);
  CHECK_EQ(a.cover, c.cover);
  CHECK_EQ(a.dual, c.dual);
  CHECK_EQ(a.metrics.claim1_checks, c.metrics.claim1_checks);
  CHECK_EQ(a.metrics.max_payload_bits, c.metrics.max_payload_bits);
}

TEST_CASE("run-level sanity on a seeded random graph") {
  GenSpec spec;
  spec.family = GraphFamily::Gnp;
  spec.n = 40;
  spec.p = Rat(1, 4);
  spec.weights = WeightRule::UniformInt;
  spec.w_max = 8;
  spec.seed = 7;
  WeightedGraph g = generate_graph(spec);

  RunConfig cfg = half_config(Rat(1));
  cfg.record_trace = true;
  RunResult res = run(g, cfg);

  // every edge is covered
  for (const EdgeId& e : g.edges) {
    bool covered = res.statuses[e.u] == VertexStatus::InCover ||
                   res.statuses[e.v] == VertexStatus::InCover;
    CHECK(covered);
  }
  // accounting identity per vertex
  std::vector<Rat> incident(g.n);
  for (const auto& [e, val] : res.dual) {
    CHECK_GE(val, 0);
    incident[e.u] += val;
    incident[e.v] += val;
  }
  for (int v = 0; v < g.n; ++v) CHECK_EQ(Rat(g.weights[v]) - incident[v], res.final_weights[v]);
  // weights fell, levels rose, per the per-vertex state records
  std::map<int, Rat> last_w;
  std::map<int, long> last_level;
  for (size_t i = 1; i < res.trace.size(); ++i) {
    ordered_json j = ordered_json::parse(res.trace[i]);
    if (j["type"] != "state") continue;
    int v = j["vertex"].get<int>();
    Rat w = parse_rat(j["w"].get<std::string>());
    long level = j["level"].get<long>();
    if (last_w.count(v)) {
      CHECK_LE(w, last_w[v]);
      CHECK_GE(level, last_level[v]);
    }
    last_w[v] = w;
    last_level[v] = level;
  }
  CHECK_GT(res.metrics.claim1_checks, 0);
}

TEST_CASE("degenerate epsilon >= 1 still runs") {
  RunResult res = run(p3_unit(), half_config(Rat(2)));
  CHECK_EQ(res.config.params.z, 1);  // epsilon' = 1/2 at gamma 1/2
  for (const EdgeId& e : p3_unit().edges) {
    bool covered = res.statuses[e.u] == VertexStatus::InCover ||
                   res.statuses[e.v] == VertexStatus::InCover;
    CHECK(covered);
  }
}

TEST_CASE("replay accepts faithful traces and localizes tampering") {
  RunConfig cfg = half_config(Rat(1, 8));
  cfg.record_trace = true;
  RunResult res = run(k4_pow2(), cfg);

  ReplayResult ok = replay(res.trace);
  CHECK(ok.ok());
  CHECK_EQ(ok.records_checked, res.trace.size());
  CHECK_EQ(ok.graph.n, 4);
  CHECK_EQ(ok.fresh.dual_sum, Rat(31, 6));

  // tamper with one budget amount
  std::vector<std::string> tampered = res.trace;
  size_t line = 0;
  for (size_t i = 0; i < tampered.size(); ++i) {
    if (tampered[i].find("\"variant\":\"budget\"") != std::string::npos &&
        tampered[i].find("\"amount\":\"1/3\"") != std::string::npos) {
      line = i;
      break;
    }
  }
  REQUIRE_GT(line, 0);
  std::string& s = tampered[line];
  s.replace(s.find("\"amount\":\"1/3\""), 14, "\"amount\":\"1/5\"");
  ReplayResult bad = replay(tampered);
  CHECK_FALSE(bad.ok());
  REQUIRE_GE(bad.divergences.size(), 1);
  CHECK(bad.divergences[0].find("line " + std::to_string(line + 1)) != std::string::npos);
  CHECK(bad.divergences[0].find("iteration 0") != std::string::npos);

  // a dropped record shows up as a length mismatch
  std::vector<std::string> truncated = res.trace;
  truncated.pop_back();
  CHECK_FALSE(replay(truncated).ok());

  // malformed input is an error, not a divergence
  CHECK_THROWS_AS(replay({}), std::invalid_argument);
  CHECK_THROWS_AS(replay({"not json"}), std::invalid_argument);
  CHECK_THROWS_AS(replay({R"({"type":"message"})"}), std::invalid_argument);
}

TEST_CASE("replay of the empty graph's trace is an empty stream") {
  RunConfig cfg = half_config(Rat(1));
  cfg.record_trace = true;
  RunResult res = run(parse_graph("p wvc 0 0\n"), cfg);
  ReplayResult rep = replay(res.trace);
  CHECK(rep.ok());
  CHECK_EQ(rep.records_checked, 1);
  CHECK_EQ(rep.divergences.size(), 0);
}

TEST_CASE("replay reproduces every recorded run regardless of mode") {
  GenSpec spec;
  spec.family = GraphFamily::Gnp;
  spec.n = 24;
  spec.p = Rat(2, 5);
  spec.weights = WeightRule::UniformInt;
  spec.w_max = 6;
  spec.seed = 99;
  WeightedGraph g = generate_graph(spec);

  for (GammaMode mode :
       {GammaMode::AutoDelta, GammaMode::Half, GammaMode::EpsPower, GammaMode::BcsBaseline}) {
    RunConfig cfg;
    cfg.epsilon = Rat(1, 2);
    cfg.gamma_mode = mode;
    cfg.eps_power_q = 2;
    cfg.record_trace = true;
    RunResult res = run(g, cfg);
    ReplayResult rep = replay(res.trace);
    CAPTURE(gamma_mode_name(mode, cfg.eps_power_q));
    CHECK(rep.ok());
  }
  RunConfig cfg;
  cfg.epsilon = Rat(1, 2);
  cfg.gamma_mode = GammaMode::Fixed;
  cfg.gamma_fixed = Rat(2, 7);
  cfg.record_trace = true;
  RunResult res = run(g, cfg);
  CHECK(replay(res.trace).ok());
}
