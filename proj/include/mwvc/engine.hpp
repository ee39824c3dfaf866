#pragma once

// Synchronous phased scheduler for the weight-reduction cover protocol.
//
// Each iteration runs four phases in a fixed order:
//   A  deliver cover announcements (prune neighbors, settle isolated
//      vertices), then every surviving active vertex announces its level
//   B  offers are computed and sent to the lowest-level neighbors
//   C  receivers grant budgets greedily in ascending sender id
//   D  weights and levels are updated; fresh cover members announce it
// A message sent in phase X is readable in phase X+1 and not earlier;
// phase-D messages wrap to the next iteration's phase A. The reported
// round count is 4 * (max iterations over vertices).
//
// All per-vertex work inside a phase reads only frozen inboxes from the
// previous phase and mutates only that vertex, so a phase can run on a
// thread pool. Message routing, trace records, metrics, and dual updates
// are committed sequentially in ascending vertex id afterwards, which
// makes parallel and sequential schedules byte-identical.
//
// The engine asserts, in exact arithmetic and on every run:
//   - the level invariant gamma^l < w/w0 <= gamma^(l-1) for every active
//     vertex at the start of every iteration,
//   - the grant dichotomy: if a vertex stays active, its lowest neighbor
//     level is unchanged, and the count of lowest-level neighbors did not
//     shrink by more than the analysis factor K, then its weight dropped
//     by at least w0 * gamma^l / K that iteration,
//   - the per-vertex iteration bound ceil(z * (K/gamma + log_K degree)).
// Any violation throws SimulationError: these are theorems, so a failure
// is a bug, never data.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mwvc/exact.hpp"
#include "mwvc/graph.hpp"
#include "mwvc/protocol.hpp"

namespace mwvc {

enum class GammaMode { AutoDelta, Half, EpsPower, BcsBaseline, Fixed };

// Canonical flag spelling: "auto", "half", "eps-power:<q>", "bcs", "fixed".
std::string gamma_mode_name(GammaMode mode, int eps_power_q);
GammaMode parse_gamma_mode(std::string_view name, int& eps_power_q);

struct RunConfig {
  Rat epsilon;
  GammaMode gamma_mode = GammaMode::AutoDelta;
  Rat gamma_fixed;                         // Fixed mode only
  int eps_power_q = 1;                     // EpsPower mode only
  std::optional<Rat> analysis_K;           // default from max degree
  std::optional<long long> iteration_cap;  // default 10 * worst-case bound
  bool record_trace = false;
  int threads = 1;
};

struct ResolvedConfig {
  GammaMode gamma_mode = GammaMode::Half;
  int eps_power_q = 1;
  ProtocolParams params;  // epsilon, epsilon_prime, gamma, z
  Rat analysis_K;
  long long bound_max = 0;  // iteration bound at the max degree
  long long iteration_cap = 0;
  bool record_trace = false;
  int threads = 1;
};

// gamma selection per mode, bound and cap evaluation, validation.
ResolvedConfig resolve_config(const WeightedGraph& g, const RunConfig& cfg);

// max(2, sqrt(log2 delta) / floor(log2 floor(log2 delta))) for delta > 16,
// else 2; the square root is taken on the 2^-30 grid, rounded down.
Rat default_analysis_K(const Int& max_degree);

struct MessageCounts {
  long long level = 0;    // phase A
  long long request = 0;  // phase B
  long long budget = 0;   // phase C
  long long cover = 0;    // phase D
  long long total() const { return level + request + budget + cover; }
};

struct RunMetrics {
  long long max_iterations = 0;
  long long rounds = 0;  // always 4 * max_iterations
  MessageCounts messages;
  unsigned max_payload_bits = 0;  // num bits + den bits of the largest payload
  long max_active_level = 0;      // highest level any vertex held while active
  long long claim1_checks = 0;
  long long dichotomy_checks = 0;  // iterations where the dichotomy premise held
};

struct RunResult {
  ResolvedConfig config;
  std::vector<VertexStatus> statuses;
  std::vector<Rat> final_weights;
  std::vector<long> levels;
  std::vector<long long> iterations;
  std::vector<int> cover;      // ascending ids
  std::map<EdgeId, Rat> dual;  // delta(e) for every edge that received a grant
  Rat cover_weight;
  Rat dual_sum;
  RunMetrics metrics;
  // Line-delimited JSON; empty unless record_trace. First line is a header
  // that embeds the serialized graph and the resolved configuration, so a
  // trace is a self-contained replayable artifact.
  std::vector<std::string> trace;
};

RunResult run(const WeightedGraph& g, const RunConfig& cfg);

struct ReplayResult {
  WeightedGraph graph;    // parsed back from the trace header
  RunResult fresh;        // the re-derived run
  size_t records_checked = 0;
  std::vector<std::string> divergences;  // human-readable, with line numbers
  bool ok() const { return divergences.empty(); }
};

// Re-runs the simulation described by the trace header and compares every
// record byte for byte; any mismatch (tampering, nondeterminism) is reported
// with its line number and iteration. Throws std::invalid_argument on
// malformed input.
ReplayResult replay(const std::vector<std::string>& trace_lines);

}  // namespace mwvc
