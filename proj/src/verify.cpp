#include "mwvc/verify.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace mwvc {

bool Verdict::all_pass() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* Verdict::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void Verdict::add_pass(const std::string& name) { checks.push_back({name, true, ""}); }

void Verdict::add_fail(const std::string& name, const std::string& witness) {
  checks.push_back({name, false, witness});
}

void Verdict::merge(Verdict other) {
  for (Check& c : other.checks) checks.push_back(std::move(c));
  for (auto& [k, v] : other.figures) figures.emplace(k, std::move(v));
}

namespace {

std::string edge_str(const EdgeId& e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

// Incident dual sums, after validating the edge keys themselves.
std::vector<Rat> incident_sums(const WeightedGraph& g, const std::map<EdgeId, Rat>& dual,
                               Verdict& v) {
  std::string bad;
  Rat total;
  std::vector<Rat> incident(g.n);
  for (const auto& [e, val] : dual) {
    bool known = e.u >= 0 && e.v < g.n &&
                 std::binary_search(g.edges.begin(), g.edges.end(), e);
    if (!known) {
      if (bad.empty()) bad = "edge " + edge_str(e) + " is not an edge of the graph";
      continue;
    }
    if (val < 0) {
      if (bad.empty()) bad = "edge " + edge_str(e) + " carries negative value " + to_frac_string(val);
      continue;
    }
    incident[e.u] += val;
    incident[e.v] += val;
    total += val;
  }
  if (bad.empty())
    v.add_pass("dual_edges");
  else
    v.add_fail("dual_edges", bad);
  v.figures.emplace("dual_sum", total);
  return incident;
}

void feasibility(const WeightedGraph& g, const std::vector<Rat>& incident, Verdict& v) {
  for (int u = 0; u < g.n; ++u) {
    if (incident[u] > Rat(g.weights[u])) {
      v.add_fail("dual_feasibility", "vertex " + std::to_string(u) + ": incident dual " +
                                         to_frac_string(incident[u]) + " exceeds weight " +
                                         g.weights[u].str());
      return;
    }
  }
  v.add_pass("dual_feasibility");
}

}  // namespace

Verdict check_dual(const WeightedGraph& g, const std::map<EdgeId, Rat>& dual) {
  Verdict v;
  std::vector<Rat> incident = incident_sums(g, dual, v);
  feasibility(g, incident, v);
  return v;
}

Verdict check_dual(const WeightedGraph& g, const std::map<EdgeId, Rat>& dual,
                   const std::vector<Rat>& final_weights) {
  Verdict v;
  std::vector<Rat> incident = incident_sums(g, dual, v);
  feasibility(g, incident, v);
  if (static_cast<int>(final_weights.size()) != g.n) {
    v.add_fail("accounting", "final weight vector has " + std::to_string(final_weights.size()) +
                                 " entries for " + std::to_string(g.n) + " vertices");
    return v;
  }
  for (int u = 0; u < g.n; ++u) {
    if (Rat(g.weights[u]) - incident[u] != final_weights[u]) {
      v.add_fail("accounting", "vertex " + std::to_string(u) + ": w0 - incident dual = " +
                                   to_frac_string(Rat(g.weights[u]) - incident[u]) +
                                   " but final weight is " + to_frac_string(final_weights[u]));
      return v;
    }
  }
  v.add_pass("accounting");
  return v;
}

Verdict check_cover(const WeightedGraph& g, const std::vector<int>& cover) {
  Verdict v;
  std::vector<char> in(g.n, 0);
  for (int u : cover) {
    if (u < 0 || u >= g.n) {
      v.add_fail("cover", "cover lists vertex " + std::to_string(u) + ", outside the graph");
      return v;
    }
    in[u] = 1;
  }
  for (const EdgeId& e : g.edges) {
    if (!in[e.u] && !in[e.v]) {
      v.add_fail("cover", "edge " + edge_str(e) + " has no endpoint in the cover");
      return v;
    }
  }
  v.add_pass("cover");
  return v;
}

Verdict check_tightness(const WeightedGraph& g, const std::vector<int>& cover,
                        const std::vector<Rat>& final_weights, const Rat& epsilon_prime) {
  Verdict v;
  for (int u : cover) {
    if (u < 0 || u >= g.n || static_cast<size_t>(u) >= final_weights.size()) {
      v.add_fail("tightness", "cover lists vertex " + std::to_string(u) + ", outside the graph");
      return v;
    }
    if (final_weights[u] > epsilon_prime * Rat(g.weights[u])) {
      v.add_fail("tightness", "vertex " + std::to_string(u) + ": final weight " +
                                  to_frac_string(final_weights[u]) + " exceeds eps' * w0 = " +
                                  to_frac_string(epsilon_prime * Rat(g.weights[u])));
      return v;
    }
  }
  v.add_pass("tightness");
  return v;
}

Verdict check_ratio_certificate(const WeightedGraph& g, const std::vector<int>& cover,
                                const std::map<EdgeId, Rat>& dual, const Rat& epsilon) {
  Verdict v;
  Rat cover_weight;
  for (int u : cover)
    if (u >= 0 && u < g.n) cover_weight += Rat(g.weights[u]);
  Rat dual_sum;
  for (const auto& [e, val] : dual) dual_sum += val;
  Rat bound = (2 + epsilon) * dual_sum;
  v.figures.emplace("cover_weight", cover_weight);
  v.figures.emplace("ratio_bound", bound);
  if (cover_weight <= bound)
    v.add_pass("ratio_certificate");
  else
    v.add_fail("ratio_certificate", "cover weight " + to_frac_string(cover_weight) +
                                        " exceeds (2+eps) * dual sum = " + to_frac_string(bound));
  return v;
}

Verdict check_iteration_bound(const WeightedGraph& g, const std::vector<long long>& iterations,
                              const ProtocolParams& params, const Rat& analysis_K) {
  Verdict v;
  if (static_cast<int>(iterations.size()) != g.n) {
    v.add_fail("iteration_bound", "iteration vector has " + std::to_string(iterations.size()) +
                                      " entries for " + std::to_string(g.n) + " vertices");
    return v;
  }
  long long worst = 0;
  for (int u = 0; u < g.n; ++u) {
    long long bound = iteration_bound(g.degree(u), params, analysis_K);
    worst = std::max(worst, bound);
    if (iterations[u] > bound) {
      v.add_fail("iteration_bound", "vertex " + std::to_string(u) + " ran " +
                                        std::to_string(iterations[u]) +
                                        " iterations, above its bound " + std::to_string(bound));
      v.figures.emplace("iteration_bound_max", Rat(worst));
      return v;
    }
  }
  v.add_pass("iteration_bound");
  v.figures.emplace("iteration_bound_max", Rat(worst));
  return v;
}

Verdict verify_run(const WeightedGraph& g, const RunResult& res) {
  Verdict v = check_dual(g, res.dual, res.final_weights);
  v.merge(check_cover(g, res.cover));
  v.merge(check_tightness(g, res.cover, res.final_weights, res.config.params.epsilon_prime));
  v.merge(check_ratio_certificate(g, res.cover, res.dual, res.config.params.epsilon));
  v.merge(check_iteration_bound(g, res.iterations, res.config.params, res.config.analysis_K));
  return v;
}

namespace {

struct OracleSearch {
  const WeightedGraph& g;
  std::vector<uint32_t> adj;
  uint32_t all = 0;
  Int best_weight;
  uint32_t best_mask = 0;

  explicit OracleSearch(const WeightedGraph& graph) : g(graph), adj(g.n, 0) {
    for (const EdgeId& e : g.edges) {
      adj[e.u] |= uint32_t(1) << e.v;
      adj[e.v] |= uint32_t(1) << e.u;
    }
    for (int v = 0; v < g.n; ++v) {
      all |= uint32_t(1) << v;
      best_weight += g.weights[v];
    }
    best_mask = all;  // the everything-cover is always valid
  }

  Int weight_of(uint32_t mask) const {
    Int w;
    for (int v = 0; v < g.n; ++v)
      if (mask & (uint32_t(1) << v)) w += g.weights[v];
    return w;
  }

  // Disjoint uncovered edges each cost at least their lighter endpoint.
  Int matching_bound(uint32_t in) const {
    uint32_t used = in;
    Int lb;
    for (const EdgeId& e : g.edges) {
      uint32_t bu = uint32_t(1) << e.u, bv = uint32_t(1) << e.v;
      if ((used & bu) || (used & bv)) continue;
      lb += std::min(g.weights[e.u], g.weights[e.v]);
      used |= bu | bv;
    }
    return lb;
  }

  void search(uint32_t in, uint32_t out, const Int& cur) {
    // every neighbor of an `out` vertex is already `in`, so uncovered
    // edges run between undecided vertices only
    int pick = -1, pick_deg = 0;
    for (int v = 0; v < g.n; ++v) {
      uint32_t bv = uint32_t(1) << v;
      if ((in & bv) || (out & bv)) continue;
      int deg = std::popcount(adj[v] & ~in & ~out);
      if (deg > pick_deg) {
        pick_deg = deg;
        pick = v;
      }
    }
    if (pick < 0) {
      if (cur < best_weight) {
        best_weight = cur;
        best_mask = in;
      }
      return;
    }
    if (cur + matching_bound(in) >= best_weight) return;
    search(in | (uint32_t(1) << pick), out, cur + g.weights[pick]);
    uint32_t forced = adj[pick] & ~in;
    Int forced_weight;
    for (int v = 0; v < g.n; ++v)
      if (forced & (uint32_t(1) << v)) forced_weight += g.weights[v];
    search(in | forced, out | (uint32_t(1) << pick), cur + forced_weight);
  }
};

std::vector<int> mask_vertices(uint32_t mask, int n) {
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (mask & (uint32_t(1) << v)) out.push_back(v);
  return out;
}

}  // namespace

ExactCover exact_mwvc(const WeightedGraph& g, int cap) {
  if (g.n > cap)
    throw std::invalid_argument("exact cover oracle capped at " + std::to_string(cap) +
                                " vertices, got " + std::to_string(g.n));
  if (g.n == 0) return {Int(0), {}};
  OracleSearch s(g);
  s.search(0, 0, Int(0));
  return {s.best_weight, mask_vertices(s.best_mask, g.n)};
}

ExactCover exact_mwvc_enumerate(const WeightedGraph& g) {
  if (g.n > 20)
    throw std::invalid_argument("enumeration oracle is limited to 20 vertices");
  if (g.n == 0) return {Int(0), {}};
  std::vector<uint32_t> adj(g.n, 0);
  for (const EdgeId& e : g.edges) {
    adj[e.u] |= uint32_t(1) << e.v;
    adj[e.v] |= uint32_t(1) << e.u;
  }
  uint32_t total = uint32_t(1) << g.n;
  bool have = false;
  Int best_weight;
  uint32_t best_mask = 0;
  for (uint32_t mask = 0; mask < total; ++mask) {
    bool valid = true;
    for (int v = 0; v < g.n && valid; ++v)
      if (!(mask & (uint32_t(1) << v)) && (adj[v] & ~mask)) valid = false;
    if (!valid) continue;
    Int w;
    for (int v = 0; v < g.n; ++v)
      if (mask & (uint32_t(1) << v)) w += g.weights[v];
    if (!have || w < best_weight) {
      have = true;
      best_weight = w;
      best_mask = mask;
    }
  }
  return {best_weight, mask_vertices(best_mask, g.n)};
}

Verdict check_ratio_vs_opt(const WeightedGraph& g, const std::vector<int>& cover,
                           const Rat& epsilon, const ExactCover& opt) {
  Verdict v;
  Rat cover_weight;
  for (int u : cover)
    if (u >= 0 && u < g.n) cover_weight += Rat(g.weights[u]);
  Rat bound = (2 + epsilon) * Rat(opt.weight);
  v.figures.emplace("opt_weight", Rat(opt.weight));
  if (cover_weight <= bound)
    v.add_pass("ratio_vs_opt");
  else
    v.add_fail("ratio_vs_opt", "cover weight " + to_frac_string(cover_weight) +
                                   " exceeds (2+eps) * OPT = " + to_frac_string(bound));
  return v;
}

}  // namespace mwvc
