#pragma once

// Certification of a completed run. Every check is an exact rational
// comparison with zero tolerance; a failed check always carries a concrete
// witness (the vertex or edge responsible and the offending values).
//
// The approximation guarantee is checked two ways:
//   - against the exact optimum (branch-and-bound oracle, small graphs),
//   - against the dual certificate: any edge packing delta with
//     sum_{e at v} delta(e) <= w(v) has sum_e delta(e) <= OPT, so
//     cover_weight <= (2+eps) * dual_sum certifies the ratio at any size.

#include <map>
#include <string>
#include <vector>

#include "mwvc/engine.hpp"
#include "mwvc/exact.hpp"
#include "mwvc/graph.hpp"
#include "mwvc/protocol.hpp"

namespace mwvc {

struct Check {
  std::string name;
  bool pass = true;
  std::string witness;  // empty when pass
};

struct Verdict {
  std::vector<Check> checks;           // insertion order, deterministic
  std::map<std::string, Rat> figures;  // named exact summary values

  bool all_pass() const;
  const Check* find(const std::string& name) const;
  void add_pass(const std::string& name);
  void add_fail(const std::string& name, const std::string& witness);
  void merge(Verdict other);
};

// "dual_edges":      delta is defined on edges of g only, all values >= 0
// "dual_feasibility": sum_{e at v} delta(e) <= w(v) for every vertex
// figures: dual_sum
Verdict check_dual(const WeightedGraph& g, const std::map<EdgeId, Rat>& dual);

// The above plus "accounting": w_final(v) = w0(v) - sum_{e at v} delta(e).
Verdict check_dual(const WeightedGraph& g, const std::map<EdgeId, Rat>& dual,
                   const std::vector<Rat>& final_weights);

// "cover": every edge has at least one endpoint in the cover.
Verdict check_cover(const WeightedGraph& g, const std::vector<int>& cover);

// "tightness": every cover vertex ended with w_final <= eps' * w0.
Verdict check_tightness(const WeightedGraph& g, const std::vector<int>& cover,
                        const std::vector<Rat>& final_weights, const Rat& epsilon_prime);

// "ratio_certificate": cover_weight <= (2+eps) * dual_sum.
// figures: cover_weight, ratio_bound
Verdict check_ratio_certificate(const WeightedGraph& g, const std::vector<int>& cover,
                                const std::map<EdgeId, Rat>& dual, const Rat& epsilon);

// "iteration_bound": per vertex, iterations <= ceil(z*(K/gamma+log_K d(v))).
// figures: iteration_bound_max
Verdict check_iteration_bound(const WeightedGraph& g, const std::vector<long long>& iterations,
                              const ProtocolParams& params, const Rat& analysis_K);

// Every check above, on the artifacts of one run.
Verdict verify_run(const WeightedGraph& g, const RunResult& res);

struct ExactCover {
  Int weight;
  std::vector<int> vertices;  // ascending; a cover achieving the weight
};

// Exact minimum weight vertex cover. Branch and bound: branches on a vertex
// of maximum uncovered degree (take it, or take all its undecided
// neighbors), pruned by a greedy-matching lower bound. Deterministic.
// Throws std::invalid_argument when g.n exceeds the cap.
ExactCover exact_mwvc(const WeightedGraph& g, int cap = 24);

// Brute force over all 2^n subsets; the independent oracle for the oracle.
ExactCover exact_mwvc_enumerate(const WeightedGraph& g);

// "ratio_vs_opt": cover_weight <= (2+eps) * opt. figures: opt_weight
Verdict check_ratio_vs_opt(const WeightedGraph& g, const std::vector<int>& cover,
                           const Rat& epsilon, const ExactCover& opt);

}  // namespace mwvc
