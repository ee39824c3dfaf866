#pragma once

// Per-vertex protocol rules. One iteration of an active vertex v:
//
//   vault = w0(v) * gamma^level(v),   bank = w(v) - vault
//   v offers vault/d' to each remaining neighbor of minimum level
//     (d' = how many such neighbors there are)
//   v answers the requests it received greedily in ascending sender id,
//     granting min(request, bank - sum of earlier grants)
//   w(v) decreases by everything received for its own offers plus
//     everything granted
//   if w != 0 and w <= vault, level(v) becomes 1 + floor_log(gamma, w/w0)
//   v joins the cover once w == 0 or level >= z+1, where
//     z = ceil_log(gamma, eps') and eps' = eps/(2+eps)
//   a vertex whose neighbors have all joined the cover stops as NotInCover
//
// Level invariant maintained while a vertex is active:
//   gamma^level < w/w0 <= gamma^(level-1)
// which also keeps bank > 0.

#include "mwvc/exact.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mwvc {

// A protocol-rule violation: always an implementation bug or a tampered
// trace, never a property of the input.
struct SimulationError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ProtocolParams {
  Rat epsilon;
  Rat epsilon_prime;  // epsilon / (2 + epsilon)
  Rat gamma;          // in (0,1)
  long z;             // ceil_log(gamma, epsilon_prime)
};

// Validates epsilon > 0 and gamma in (0,1); derives the rest.
ProtocolParams make_protocol_params(const Rat& epsilon, const Rat& gamma);

enum class VertexStatus { Active, InCover, NotInCover };

enum class VertexDecision { ContinueActive, JoinCover, NotInCover };

struct VertexState {
  int id = 0;
  Rat w0;  // original weight, >= 1
  Rat w;   // current weight, 0 <= w <= w0
  long level = 1;
  std::vector<int> neighbors;        // remaining neighbors, sorted ascending
  std::vector<long> neighbor_levels; // parallel to neighbors
  VertexStatus status = VertexStatus::Active;
  long long iterations = 0;          // completed protocol iterations
};

struct VaultBank {
  Rat vault, bank;
};

// Requires bank > 0 for an active vertex (Claim-style invariant); throws
// SimulationError otherwise.
VaultBank compute_vault_bank(const VertexState& s, const ProtocolParams& p);

// Throws SimulationError unless gamma^level < w/w0 <= gamma^(level-1).
void assert_level_invariant(const VertexState& s, const ProtocolParams& p);

struct OfferPlan {
  std::vector<int> targets;  // remaining neighbors at the minimum level
  Rat amount;                // vault / targets.size(), same for each target
  long lowest_level = 0;
};

// Requires a non-empty neighbor list with current levels.
OfferPlan select_offer_targets(const VertexState& s, const ProtocolParams& p);

struct Request {
  int from = 0;
  Rat amount;
};

struct Grant {
  int to = 0;
  Rat amount;
};

// Greedy budget assignment in ascending sender id; grants never exceed the
// matching request and sum to min(bank, sum of requests). Requests may
// arrive in any order; amounts must be positive.
std::vector<Grant> grant_budgets(std::vector<Request> requests, const Rat& bank);

// Applies one iteration's weight change and the level/cover rules.
// Returns JoinCover when the vertex halts in the cover; the caller counts
// the iteration either way.
VertexDecision apply_iteration_outcome(VertexState& s, const Rat& received_total,
                                       const Rat& granted_total, const ProtocolParams& p);

// Removes cover announcers (sorted ascending) from the neighbor list and
// retires the vertex as NotInCover once no neighbors remain. A sender that
// is not a current neighbor is a simulation-integrity error.
VertexDecision handle_cover_and_isolation(VertexState& s, const std::vector<int>& cover_senders);

// Worst-case iteration count for a vertex of the given degree:
// ceil(z * (K/gamma + ceil_log_up(K, degree))), the log term taken as 0 for
// degree <= 1. K is the analysis constant, > 1.
long long iteration_bound(long long degree, const ProtocolParams& p, const Rat& analysis_K);

}  // namespace mwvc
