#include "mwvc/engine.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

namespace mwvc {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bug(const std::string& what) { throw SimulationError(what); }

enum class Phase { A, B, C, D };
constexpr Phase kPhases[] = {Phase::A, Phase::B, Phase::C, Phase::D};

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::A: return "A";
    case Phase::B: return "B";
    case Phase::C: return "C";
    case Phase::D: return "D";
  }
  return "?";
}

const char* variant_name(Phase p) {
  switch (p) {
    case Phase::A: return "level";
    case Phase::B: return "request";
    case Phase::C: return "budget";
    case Phase::D: return "cover";
  }
  return "?";
}

const char* status_name(VertexStatus s) {
  switch (s) {
    case VertexStatus::Active: return "active";
    case VertexStatus::InCover: return "in_cover";
    case VertexStatus::NotInCover: return "not_in_cover";
  }
  return "?";
}

struct Msg {
  int sender = 0;
  Rat amount;      // request / budget payload
  long level = 0;  // level announcement payload
};

struct VertexRuntime {
  VertexState st;
  // scratch carried from phase B to C/D within one iteration
  Rat bank;
  Rat granted_total;
  long long dprime = 0;
  // previous-iteration snapshot backing the dichotomy check
  bool has_prev = false;
  long prev_lowest_level = 0;
  long long prev_dprime = 0;
  Rat prev_w;
  long prev_level = 1;
};

struct PhaseOut {
  std::vector<std::pair<int, Msg>> outgoing;  // (receiver, message), emission order
  bool emit_state = false;                    // phase A isolation or phase D outcome
  bool was_active = false;                    // active at phase A entry
  long long dichotomy = 0;
  std::exception_ptr error;

  void clear() {
    outgoing.clear();
    emit_state = false;
    was_active = false;
    dichotomy = 0;
    error = nullptr;
  }
};

struct Engine {
  const WeightedGraph& g;
  ResolvedConfig cfg;
  std::vector<VertexRuntime> vs;
  std::vector<std::vector<Msg>> inbox, next_inbox;
  std::vector<PhaseOut> outs;
  std::map<EdgeId, Rat> dual;
  RunMetrics metrics;
  std::vector<std::string> trace;
  long long it = 0;

  Engine(const WeightedGraph& graph, ResolvedConfig resolved)
      : g(graph), cfg(std::move(resolved)) {
    vs.resize(g.n);
    inbox.resize(g.n);
    next_inbox.resize(g.n);
    outs.resize(g.n);
    for (int v = 0; v < g.n; ++v) {
      VertexState& st = vs[v].st;
      st.id = v;
      st.w0 = Rat(g.weights[v]);
      st.w = st.w0;
      st.neighbors = g.adj[v];
      st.neighbor_levels.assign(g.adj[v].size(), 1);
    }
  }

  void emit_header() {
    if (!cfg.record_trace) return;
    ordered_json j;
    j["type"] = "header";
    j["format"] = "mwvc-trace-v1";
    j["graph"] = serialize_graph(g);
    j["epsilon"] = to_frac_string(cfg.params.epsilon);
    j["epsilon_prime"] = to_frac_string(cfg.params.epsilon_prime);
    j["gamma_mode"] = gamma_mode_name(cfg.gamma_mode, cfg.eps_power_q);
    j["gamma"] = to_frac_string(cfg.params.gamma);
    j["z"] = cfg.params.z;
    j["analysis_K"] = to_frac_string(cfg.analysis_K);
    j["iteration_cap"] = cfg.iteration_cap;
    trace.push_back(j.dump());
  }

  void record_message(Phase ph, int sender, int receiver, const Msg& m) {
    if (!cfg.record_trace) return;
    ordered_json j;
    j["type"] = "message";
    j["iteration"] = it;
    j["phase"] = phase_name(ph);
    j["sender"] = sender;
    j["receiver"] = receiver;
    j["variant"] = variant_name(ph);
    if (ph == Phase::A) j["level"] = m.level;
    if (ph == Phase::B || ph == Phase::C) j["amount"] = to_frac_string(m.amount);
    trace.push_back(j.dump());
  }

  void record_delta(const EdgeId& e, const Rat& running) {
    if (!cfg.record_trace) return;
    ordered_json j;
    j["type"] = "delta";
    j["iteration"] = it;
    j["phase"] = "C";
    j["edge"] = {e.u, e.v};
    j["value"] = to_frac_string(running);
    trace.push_back(j.dump());
  }

  void record_state(Phase ph, int v) {
    if (!cfg.record_trace) return;
    const VertexState& st = vs[v].st;
    ordered_json j;
    j["type"] = "state";
    j["iteration"] = it;
    j["phase"] = phase_name(ph);
    j["vertex"] = v;
    j["w"] = to_frac_string(st.w);
    j["level"] = st.level;
    j["status"] = status_name(st.status);
    j["iterations"] = st.iterations;
    trace.push_back(j.dump());
  }

  // Phase A: settle cover removals and isolation, then announce levels.
  void phase_a(int v) {
    VertexRuntime& r = vs[v];
    assert_level_invariant(r.st, cfg.params);
    outs[v].was_active = true;
    std::vector<int> senders;
    senders.reserve(inbox[v].size());
    for (const Msg& m : inbox[v]) senders.push_back(m.sender);
    if (handle_cover_and_isolation(r.st, senders) == VertexDecision::NotInCover) {
      // A vertex with no neighbors at all still spends its first iteration
      // discovering that; later isolation is the tail of the previous one.
      if (r.st.iterations == 0) r.st.iterations = 1;
      outs[v].emit_state = true;
      return;
    }
    r.st.iterations += 1;
    for (int u : r.st.neighbors) outs[v].outgoing.push_back({u, Msg{v, Rat(), r.st.level}});
  }

  // Phase B: refresh neighbor levels, check the dichotomy, send offers.
  void phase_b(int v) {
    VertexRuntime& r = vs[v];
    const std::vector<Msg>& msgs = inbox[v];
    if (msgs.size() != r.st.neighbors.size())
      bug("vertex " + std::to_string(v) + ": level announcements do not match the neighbor list");
    for (size_t i = 0; i < msgs.size(); ++i) {
      if (msgs[i].sender != r.st.neighbors[i])
        bug("vertex " + std::to_string(v) + ": level announcement from unexpected sender " +
            std::to_string(msgs[i].sender));
      r.st.neighbor_levels[i] = msgs[i].level;
    }
    OfferPlan plan = select_offer_targets(r.st, cfg.params);
    long long dp = static_cast<long long>(plan.targets.size());
    if (r.has_prev && plan.lowest_level == r.prev_lowest_level &&
        Rat(dp) * cfg.analysis_K >= Rat(r.prev_dprime)) {
      outs[v].dichotomy += 1;
      Rat floor_drop =
          r.st.w0 * rat_pow(cfg.params.gamma, static_cast<unsigned long>(r.prev_level)) /
          cfg.analysis_K;
      if (!(r.st.w <= r.prev_w - floor_drop))
        bug("vertex " + std::to_string(v) + ": dichotomy violated: weight " +
            to_frac_string(r.st.w) + " did not drop to " +
            to_frac_string(r.prev_w - floor_drop) + " or below");
    }
    r.has_prev = true;
    r.prev_lowest_level = plan.lowest_level;
    r.prev_dprime = dp;
    r.prev_w = r.st.w;
    r.prev_level = r.st.level;
    VaultBank vb = compute_vault_bank(r.st, cfg.params);
    r.bank = vb.bank;
    r.dprime = dp;
    r.granted_total = Rat();
    Rat offer = vb.vault / Rat(dp);
    for (int u : plan.targets) outs[v].outgoing.push_back({u, Msg{v, offer, 0}});
  }

  // Phase C: grant received offers greedily in ascending sender id.
  void phase_c(int v) {
    VertexRuntime& r = vs[v];
    std::vector<Request> reqs;
    reqs.reserve(inbox[v].size());
    for (const Msg& m : inbox[v]) reqs.push_back({m.sender, m.amount});
    for (const Grant& gr : grant_budgets(std::move(reqs), r.bank)) {
      r.granted_total += gr.amount;
      outs[v].outgoing.push_back({gr.to, Msg{v, gr.amount, 0}});
    }
  }

  // Phase D: apply the weight/level outcome; fresh cover members announce.
  void phase_d(int v) {
    VertexRuntime& r = vs[v];
    if (static_cast<long long>(inbox[v].size()) != r.dprime)
      bug("vertex " + std::to_string(v) + ": budget replies do not match the offer count");
    Rat received;
    for (const Msg& m : inbox[v]) received += m.amount;
    VertexDecision d = apply_iteration_outcome(r.st, received, r.granted_total, cfg.params);
    outs[v].emit_state = true;
    if (d == VertexDecision::JoinCover)
      for (int u : r.st.neighbors) outs[v].outgoing.push_back({u, Msg{v, Rat(), 0}});
  }

  void compute_range(Phase ph, int begin, int end) {
    for (int v = begin; v < end; ++v) {
      outs[v].clear();
      if (vs[v].st.status != VertexStatus::Active) continue;
      try {
        switch (ph) {
          case Phase::A: phase_a(v); break;
          case Phase::B: phase_b(v); break;
          case Phase::C: phase_c(v); break;
          case Phase::D: phase_d(v); break;
        }
      } catch (...) {
        outs[v].error = std::current_exception();
      }
    }
  }

  void compute(Phase ph) {
    int workers = std::min(cfg.threads, g.n);
    if (workers <= 1) {
      compute_range(ph, 0, g.n);
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (g.n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      int b = t * chunk;
      int e = std::min(g.n, b + chunk);
      if (b >= e) break;
      pool.emplace_back([this, ph, b, e] { compute_range(ph, b, e); });
    }
    for (std::thread& th : pool) th.join();
  }

  void note_payload(Phase ph, const Msg& m) {
    unsigned bits = 1;  // cover announcements carry one bit
    if (ph == Phase::A) bits = bit_length(Int(m.level));
    if (ph == Phase::B || ph == Phase::C) bits = rat_bits(m.amount);
    metrics.max_payload_bits = std::max(metrics.max_payload_bits, bits);
    switch (ph) {
      case Phase::A: metrics.messages.level += 1; break;
      case Phase::B: metrics.messages.request += 1; break;
      case Phase::C: metrics.messages.budget += 1; break;
      case Phase::D: metrics.messages.cover += 1; break;
    }
  }

  // Sequential, ascending vertex id: the only place where messages are
  // routed, metrics and the dual are updated, and trace lines are written.
  void commit(Phase ph) {
    for (int v = 0; v < g.n; ++v)
      if (outs[v].error) std::rethrow_exception(outs[v].error);
    for (int v = 0; v < g.n; ++v) {
      PhaseOut& out = outs[v];
      if (out.was_active) {
        metrics.claim1_checks += 1;
        metrics.max_active_level = std::max(metrics.max_active_level, vs[v].st.level);
      }
      metrics.dichotomy_checks += out.dichotomy;
      if (out.emit_state) record_state(ph, v);
      for (const auto& [to, m] : out.outgoing) {
        note_payload(ph, m);
        record_message(ph, v, to, m);
        if (ph == Phase::C && m.amount > 0) {
          Rat& cell = dual[EdgeId::make(v, to)];
          cell += m.amount;
          record_delta(EdgeId::make(v, to), cell);
        }
        next_inbox[to].push_back(m);
      }
    }
  }

  void step_phase(Phase ph) {
    std::swap(inbox, next_inbox);
    for (std::vector<Msg>& b : next_inbox) b.clear();
    compute(ph);
    commit(ph);
  }

  bool any_active() const {
    for (const VertexRuntime& r : vs)
      if (r.st.status == VertexStatus::Active) return true;
    return false;
  }

  RunResult finish() {
    for (int v = 0; v < g.n; ++v) {
      long long bound = iteration_bound(g.degree(v), cfg.params, cfg.analysis_K);
      if (vs[v].st.iterations > bound)
        bug("vertex " + std::to_string(v) + " ran " + std::to_string(vs[v].st.iterations) +
            " iterations, above its bound " + std::to_string(bound));
      metrics.max_iterations = std::max(metrics.max_iterations, vs[v].st.iterations);
    }
    metrics.rounds = 4 * metrics.max_iterations;
    RunResult res;
    res.config = cfg;
    res.statuses.reserve(g.n);
    res.final_weights.reserve(g.n);
    res.levels.reserve(g.n);
    res.iterations.reserve(g.n);
    for (int v = 0; v < g.n; ++v) {
      const VertexState& st = vs[v].st;
      res.statuses.push_back(st.status);
      res.final_weights.push_back(st.w);
      res.levels.push_back(st.level);
      res.iterations.push_back(st.iterations);
      if (st.status == VertexStatus::InCover) {
        res.cover.push_back(v);
        res.cover_weight += st.w0;
      }
    }
    for (const auto& [e, val] : dual) res.dual_sum += val;
    res.dual = std::move(dual);
    res.metrics = metrics;
    res.trace = std::move(trace);
    return res;
  }
};

// Pulls the iteration field out of a trace line to label a divergence.
std::string iteration_hint(const std::string& line) {
  try {
    ordered_json j = ordered_json::parse(line);
    if (j.contains("iteration")) return " (iteration " + j["iteration"].dump() + ")";
  } catch (const std::exception&) {
  }
  return "";
}

}  // namespace

std::string gamma_mode_name(GammaMode mode, int eps_power_q) {
  switch (mode) {
    case GammaMode::AutoDelta: return "auto";
    case GammaMode::Half: return "half";
    case GammaMode::EpsPower: return "eps-power:" + std::to_string(eps_power_q);
    case GammaMode::BcsBaseline: return "bcs";
    case GammaMode::Fixed: return "fixed";
  }
  throw std::logic_error("unknown gamma mode");
}

GammaMode parse_gamma_mode(std::string_view name, int& eps_power_q) {
  eps_power_q = 1;
  if (name == "auto") return GammaMode::AutoDelta;
  if (name == "half") return GammaMode::Half;
  if (name == "bcs") return GammaMode::BcsBaseline;
  if (name == "fixed") return GammaMode::Fixed;
  constexpr std::string_view prefix = "eps-power:";
  if (name.substr(0, prefix.size()) == prefix) {
    std::string digits(name.substr(prefix.size()));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("eps-power exponent must be a positive integer");
    eps_power_q = std::stoi(digits);
    if (eps_power_q < 1) throw std::invalid_argument("eps-power exponent must be >= 1");
    return GammaMode::EpsPower;
  }
  throw std::invalid_argument("unknown gamma mode: " + std::string(name));
}

Rat default_analysis_K(const Int& max_degree) {
  if (max_degree <= 16) return Rat(2);
  Int log_delta(floor_log2(max_degree));               // >= 4
  Int sqrt_grid = isqrt(log_delta << 60);              // floor(2^30 * sqrt(log2 delta))
  Rat k(sqrt_grid, (Int(1) << 30) * floor_log2(log_delta));
  return std::max(Rat(2), k);
}

ResolvedConfig resolve_config(const WeightedGraph& g, const RunConfig& cfg) {
  if (cfg.epsilon <= 0) throw std::invalid_argument("epsilon must be > 0");
  Int delta(g.max_degree());
  Rat gamma;
  switch (cfg.gamma_mode) {
    case GammaMode::AutoDelta:
      gamma = delta > 16 ? inv_sqrt_log_approx(delta) : Rat(1, 2);
      break;
    case GammaMode::Half:
      gamma = Rat(1, 2);
      break;
    case GammaMode::EpsPower:
      if (cfg.eps_power_q < 1) throw std::invalid_argument("eps-power exponent must be >= 1");
      gamma = eps_power_gamma(cfg.epsilon, cfg.eps_power_q);
      break;
    case GammaMode::BcsBaseline:
      gamma = cfg.epsilon / (2 + cfg.epsilon);
      break;
    case GammaMode::Fixed:
      if (!(cfg.gamma_fixed > 0 && cfg.gamma_fixed < 1))
        throw std::invalid_argument("fixed gamma must lie in (0,1)");
      gamma = cfg.gamma_fixed;
      break;
  }
  ResolvedConfig r;
  r.gamma_mode = cfg.gamma_mode;
  r.eps_power_q = cfg.eps_power_q;
  r.params = make_protocol_params(cfg.epsilon, gamma);
  r.analysis_K = cfg.analysis_K.value_or(default_analysis_K(delta));
  if (r.analysis_K <= 1) throw std::invalid_argument("analysis_K must be > 1");
  r.bound_max = iteration_bound(g.max_degree(), r.params, r.analysis_K);
  r.iteration_cap = cfg.iteration_cap.value_or(10 * r.bound_max);
  if (r.iteration_cap < 1) throw std::invalid_argument("iteration cap must be >= 1");
  r.record_trace = cfg.record_trace;
  r.threads = std::max(1, cfg.threads);
  return r;
}

RunResult run(const WeightedGraph& g, const RunConfig& cfg) {
  Engine eng(g, resolve_config(g, cfg));
  eng.emit_header();
  while (eng.any_active()) {
    if (eng.it >= eng.cfg.iteration_cap)
      bug("iteration cap " + std::to_string(eng.cfg.iteration_cap) +
          " reached without global termination");
    for (Phase ph : kPhases) eng.step_phase(ph);
    eng.it += 1;
  }
  return eng.finish();
}

ReplayResult replay(const std::vector<std::string>& trace_lines) {
  if (trace_lines.empty()) throw std::invalid_argument("trace is empty: missing header line");
  ReplayResult res;
  RunConfig rc;
  try {
    ordered_json h = ordered_json::parse(trace_lines[0]);
    if (h.at("type") != "header" || h.at("format") != "mwvc-trace-v1")
      throw std::invalid_argument("first trace line is not a recognized header");
    res.graph = parse_graph(h.at("graph").get<std::string>());
    rc.epsilon = parse_rat(h.at("epsilon").get<std::string>());
    rc.gamma_mode = parse_gamma_mode(h.at("gamma_mode").get<std::string>(), rc.eps_power_q);
    if (rc.gamma_mode == GammaMode::Fixed)
      rc.gamma_fixed = parse_rat(h.at("gamma").get<std::string>());
    rc.analysis_K = parse_rat(h.at("analysis_K").get<std::string>());
    rc.iteration_cap = h.at("iteration_cap").get<long long>();
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("malformed trace header: ") + e.what());
  }
  rc.record_trace = true;
  rc.threads = 1;
  res.fresh = run(res.graph, rc);

  const std::vector<std::string>& fresh = res.fresh.trace;
  size_t overlap = std::min(fresh.size(), trace_lines.size());
  constexpr size_t kMaxReported = 20;
  for (size_t i = 0; i < overlap; ++i) {
    if (trace_lines[i] == fresh[i]) continue;
    if (res.divergences.size() == kMaxReported) {
      res.divergences.push_back("(further divergences suppressed)");
      break;
    }
    res.divergences.push_back("line " + std::to_string(i + 1) + iteration_hint(trace_lines[i]) +
                              ": recorded " + trace_lines[i] + " but re-derived " + fresh[i]);
  }
  if (trace_lines.size() != fresh.size())
    res.divergences.push_back("trace has " + std::to_string(trace_lines.size()) +
                              " records but the re-derived run has " +
                              std::to_string(fresh.size()));
  res.records_checked = overlap;
  return res;
}

}  // namespace mwvc
