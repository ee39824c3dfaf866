#pragma once

// Undirected vertex-weighted graphs, their text format, and the seeded
// generator families used by the experiment driver.
//
// File format ("wvc"):
//   p wvc <n> <m>
//   v <id> <weight>        (n lines, ids 0..n-1, each exactly once)
//   e <u> <v>              (m lines, u != v, no duplicates in either order)
// '#'-prefixed lines are comments; blank lines are ignored; any other line
// is an error. Weights are positive integers, capped at max(2,n)^6 to keep
// them polynomial in n.

#include "mwvc/exact.hpp"

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mwvc {

struct EdgeId {
  int u = 0;  // always u < v
  int v = 0;

  static EdgeId make(int a, int b) { return a < b ? EdgeId{a, b} : EdgeId{b, a}; }
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

struct WeightedGraph {
  int n = 0;
  std::vector<Int> weights;            // size n, each >= 1
  std::vector<std::vector<int>> adj;   // sorted neighbor lists
  std::vector<EdgeId> edges;           // canonical (u,v) lexicographic order

  long long m() const { return static_cast<long long>(edges.size()); }
  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  int max_degree() const;
  Int max_weight() const;  // 0 for the empty graph
};

// Largest weight the format accepts for an n-vertex graph.
Int weight_cap(int n);

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

WeightedGraph parse_graph(std::string_view text);
std::string serialize_graph(const WeightedGraph& g);

// The PRNG behind every seeded generator; fixed algorithm, so a seed pins
// the graph on every platform.
struct Splitmix64 {
  uint64_t state = 0;
  explicit Splitmix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

enum class GraphFamily { Star, Clique, Path, Gnp, BoundedDegreeRandom };
enum class WeightRule { Unit, UniformInt };

struct GenSpec {
  GraphFamily family = GraphFamily::Star;
  int n = 0;           // Clique, Path, Gnp, BoundedDegreeRandom
  int delta = 0;       // Star: number of leaves
  Rat p;               // Gnp: edge probability in [0,1]
  int max_degree = 0;  // BoundedDegreeRandom
  WeightRule weights = WeightRule::Unit;
  long long w_max = 1;  // UniformInt draws from [1, w_max]
  uint64_t seed = 0;
};

// Deterministic for a fixed spec. Edges are drawn before weights, so the
// topology for (family, size params, seed) does not depend on the weight
// rule. Throws std::invalid_argument on bad parameters.
WeightedGraph generate_graph(const GenSpec& spec);

}  // namespace mwvc
