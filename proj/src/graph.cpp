#include "mwvc/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mwvc {

int WeightedGraph::max_degree() const {
  int d = 0;
  for (const auto& a : adj) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

Int WeightedGraph::max_weight() const {
  Int w = 0;
  for (const auto& x : weights) w = std::max(w, x);
  return w;
}

Int weight_cap(int n) {
  Int base = std::max(n, 2);
  return boost::multiprecision::pow(base, 6);
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

long long parse_ll(const std::string& s, int line, const char* what) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ParseError(line, std::string(what) + " is not a nonnegative integer: '" + s + "'");
  if (s.size() > 18) throw ParseError(line, std::string(what) + " out of range: '" + s + "'");
  return std::stoll(s);
}

Int parse_weight(const std::string& s, int line) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ParseError(line, "weight is not a nonnegative integer: '" + s + "'");
  return Int(s);
}

}  // namespace

WeightedGraph parse_graph(std::string_view text) {
  WeightedGraph g;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool have_header = false;
  long long want_m = 0;
  long long seen_v = 0, seen_e = 0;
  std::vector<bool> declared;
  std::set<EdgeId> edge_set;

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks[0] == "#" || toks[0][0] == '#') continue;

    if (toks[0] == "p") {
      if (have_header) throw ParseError(lineno, "duplicate problem line");
      if (toks.size() != 4 || toks[1] != "wvc") throw ParseError(lineno, "expected 'p wvc <n> <m>'");
      long long n = parse_ll(toks[2], lineno, "vertex count");
      want_m = parse_ll(toks[3], lineno, "edge count");
      if (n > 10'000'000) throw ParseError(lineno, "vertex count out of range");
      g.n = static_cast<int>(n);
      g.weights.assign(g.n, Int(0));
      g.adj.assign(g.n, {});
      declared.assign(g.n, false);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, "problem line must come first");

    if (toks[0] == "v") {
      if (seen_e > 0) throw ParseError(lineno, "vertex line after edge lines");
      if (toks.size() != 3) throw ParseError(lineno, "expected 'v <id> <weight>'");
      long long id = parse_ll(toks[1], lineno, "vertex id");
      if (id >= g.n) throw ParseError(lineno, "vertex id out of range: " + toks[1]);
      if (declared[id]) throw ParseError(lineno, "duplicate vertex id: " + toks[1]);
      Int w = parse_weight(toks[2], lineno);
      if (w < 1) throw ParseError(lineno, "weight must be at least 1");
      if (w > weight_cap(g.n)) throw ParseError(lineno, "weight exceeds the polynomial cap");
      declared[id] = true;
      g.weights[id] = w;
      ++seen_v;
      continue;
    }

    if (toks[0] == "e") {
      if (seen_v != g.n) throw ParseError(lineno, "edge line before all vertices are declared");
      if (toks.size() != 3) throw ParseError(lineno, "expected 'e <u> <v>'");
      long long u = parse_ll(toks[1], lineno, "endpoint");
      long long v = parse_ll(toks[2], lineno, "endpoint");
      if (u >= g.n || v >= g.n) throw ParseError(lineno, "endpoint out of range");
      if (u == v) throw ParseError(lineno, "self-loop on vertex " + toks[1]);
      EdgeId e = EdgeId::make(static_cast<int>(u), static_cast<int>(v));
      if (!edge_set.insert(e).second)
        throw ParseError(lineno, "duplicate edge " + toks[1] + " " + toks[2]);
      ++seen_e;
      continue;
    }

    throw ParseError(lineno, "unrecognized line: '" + line + "'");
  }

  if (!have_header) throw ParseError(lineno, "missing problem line");
  if (seen_v != g.n)
    throw ParseError(lineno, "expected " + std::to_string(g.n) + " vertex lines, got " +
                                 std::to_string(seen_v));
  if (seen_e != want_m)
    throw ParseError(lineno, "expected " + std::to_string(want_m) + " edge lines, got " +
                                 std::to_string(seen_e));

  g.edges.assign(edge_set.begin(), edge_set.end());
  for (const auto& e : g.edges) {
    g.adj[e.u].push_back(e.v);
    g.adj[e.v].push_back(e.u);
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  return g;
}

std::string serialize_graph(const WeightedGraph& g) {
  std::string out;
  out += "p wvc " + std::to_string(g.n) + " " + std::to_string(g.m()) + "\n";
  for (int v = 0; v < g.n; ++v)
    out += "v " + std::to_string(v) + " " + g.weights[v].str() + "\n";
  for (const auto& e : g.edges)
    out += "e " + std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  return out;
}

namespace {

void add_edge(WeightedGraph& g, int u, int v) { g.edges.push_back(EdgeId::make(u, v)); }

void finish_edges(WeightedGraph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.adj.assign(g.n, {});
  for (const auto& e : g.edges) {
    g.adj[e.u].push_back(e.v);
    g.adj[e.v].push_back(e.u);
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
}

void draw_weights(WeightedGraph& g, const GenSpec& spec, Splitmix64& rng) {
  g.weights.assign(g.n, Int(1));
  if (spec.weights == WeightRule::UniformInt) {
    if (spec.w_max < 1) throw std::invalid_argument("generate_graph: w_max must be at least 1");
    if (Int(spec.w_max) > weight_cap(g.n))
      throw std::invalid_argument("generate_graph: w_max exceeds the polynomial cap");
    for (int v = 0; v < g.n; ++v)
      g.weights[v] = 1 + static_cast<long long>(rng.next() % static_cast<uint64_t>(spec.w_max));
  }
}

}  // namespace

WeightedGraph generate_graph(const GenSpec& spec) {
  WeightedGraph g;
  Splitmix64 rng(spec.seed);

  switch (spec.family) {
    case GraphFamily::Star: {
      if (spec.delta < 0) throw std::invalid_argument("generate_graph: star needs delta >= 0");
      g.n = spec.delta + 1;
      for (int leaf = 1; leaf <= spec.delta; ++leaf) add_edge(g, 0, leaf);
      break;
    }
    case GraphFamily::Clique: {
      if (spec.n < 1) throw std::invalid_argument("generate_graph: clique needs n >= 1");
      g.n = spec.n;
      for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v) add_edge(g, u, v);
      break;
    }
    case GraphFamily::Path: {
      if (spec.n < 1) throw std::invalid_argument("generate_graph: path needs n >= 1");
      g.n = spec.n;
      for (int v = 0; v + 1 < g.n; ++v) add_edge(g, v, v + 1);
      break;
    }
    case GraphFamily::Gnp: {
      if (spec.n < 1) throw std::invalid_argument("generate_graph: gnp needs n >= 1");
      if (spec.p < 0 || spec.p > 1)
        throw std::invalid_argument("generate_graph: gnp needs p in [0,1]");
      g.n = spec.n;
      // threshold compare keeps the draw exact: include iff r < p * 2^64
      Int threshold = (numerator(spec.p) << 64) / denominator(spec.p);
      bool always = threshold >= (Int(1) << 64);
      uint64_t t64 = always ? 0 : threshold.convert_to<uint64_t>();
      for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v) {
          uint64_t r = rng.next();
          if (always || r < t64) add_edge(g, u, v);
        }
      break;
    }
    case GraphFamily::BoundedDegreeRandom: {
      if (spec.n < 1) throw std::invalid_argument("generate_graph: bounded-degree needs n >= 1");
      if (spec.max_degree < 0)
        throw std::invalid_argument("generate_graph: bounded-degree needs max_degree >= 0");
      g.n = spec.n;
      std::vector<int> deg(g.n, 0);
      std::set<EdgeId> seen;
      long long target = static_cast<long long>(g.n) * spec.max_degree / 2;
      long long attempts = 2ll * g.n * std::max(spec.max_degree, 1);
      for (long long a = 0; a < attempts && static_cast<long long>(g.edges.size()) < target; ++a) {
        int u = static_cast<int>(rng.next() % static_cast<uint64_t>(g.n));
        int v = static_cast<int>(rng.next() % static_cast<uint64_t>(g.n));
        if (u == v || deg[u] >= spec.max_degree || deg[v] >= spec.max_degree) continue;
        EdgeId e = EdgeId::make(u, v);
        if (!seen.insert(e).second) continue;
        g.edges.push_back(e);
        ++deg[u];
        ++deg[v];
      }
      break;
    }
  }

  finish_edges(g);
  draw_weights(g, spec, rng);
  return g;
}

}  // namespace mwvc
