#include "mwvc/protocol.hpp"

#include <algorithm>

namespace mwvc {

namespace {

[[noreturn]] void bug(const std::string& what) { throw SimulationError(what); }

std::string vtx(const VertexState& s) { return "vertex " + std::to_string(s.id); }

}  // namespace

ProtocolParams make_protocol_params(const Rat& epsilon, const Rat& gamma) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  if (gamma <= 0 || gamma >= 1) throw std::invalid_argument("gamma must lie in (0,1)");
  ProtocolParams p;
  p.epsilon = epsilon;
  p.epsilon_prime = epsilon / (2 + epsilon);
  p.gamma = gamma;
  p.z = ceil_log(gamma, p.epsilon_prime);
  return p;
}

VaultBank compute_vault_bank(const VertexState& s, const ProtocolParams& p) {
  VaultBank vb;
  vb.vault = s.w0 * rat_pow(p.gamma, static_cast<unsigned long>(s.level));
  vb.bank = s.w - vb.vault;
  if (s.status == VertexStatus::Active && vb.bank <= 0)
    bug(vtx(s) + ": bank " + to_frac_string(vb.bank) + " not positive while active");
  return vb;
}

void assert_level_invariant(const VertexState& s, const ProtocolParams& p) {
  Rat vault = s.w0 * rat_pow(p.gamma, static_cast<unsigned long>(s.level));
  // gamma^level < w/w0  and  w/w0 <= gamma^(level-1), cross-multiplied
  if (!(vault < s.w && s.w * p.gamma <= vault))
    bug(vtx(s) + ": level invariant broken at level " + std::to_string(s.level) + ", w " +
        to_frac_string(s.w) + ", w0 " + to_frac_string(s.w0));
}

OfferPlan select_offer_targets(const VertexState& s, const ProtocolParams&) {
  if (s.neighbors.empty()) bug(vtx(s) + ": offer targets requested with no neighbors");
  if (s.neighbors.size() != s.neighbor_levels.size())
    bug(vtx(s) + ": neighbor level bookkeeping out of sync");
  OfferPlan plan;
  plan.lowest_level = *std::min_element(s.neighbor_levels.begin(), s.neighbor_levels.end());
  for (size_t i = 0; i < s.neighbors.size(); ++i)
    if (s.neighbor_levels[i] == plan.lowest_level) plan.targets.push_back(s.neighbors[i]);
  return plan;  // amount filled by the caller from vault/d'
}

std::vector<Grant> grant_budgets(std::vector<Request> requests, const Rat& bank) {
  if (bank < 0) bug("grant_budgets: negative bank");
  std::sort(requests.begin(), requests.end(),
            [](const Request& a, const Request& b) { return a.from < b.from; });
  std::vector<Grant> grants;
  grants.reserve(requests.size());
  Rat remaining = bank;
  for (const Request& r : requests) {
    if (r.amount <= 0) bug("grant_budgets: request from " + std::to_string(r.from) +
                           " is not positive: " + to_frac_string(r.amount));
    Rat give = std::min(r.amount, remaining);
    remaining -= give;
    grants.push_back({r.from, give});
  }
  return grants;
}

VertexDecision apply_iteration_outcome(VertexState& s, const Rat& received_total,
                                       const Rat& granted_total, const ProtocolParams& p) {
  if (received_total < 0 || granted_total < 0) bug(vtx(s) + ": negative iteration totals");
  Rat vault = s.w0 * rat_pow(p.gamma, static_cast<unsigned long>(s.level));
  Rat next = s.w - received_total - granted_total;
  if (next < 0)
    bug(vtx(s) + ": weight would go negative: " + to_frac_string(next));
  s.w = next;
  if (s.w != 0 && s.w <= vault)
    s.level = 1 + floor_log(p.gamma, s.w / s.w0);
  if (s.w == 0 || s.level >= p.z + 1) {
    s.status = VertexStatus::InCover;
    return VertexDecision::JoinCover;
  }
  return VertexDecision::ContinueActive;
}

VertexDecision handle_cover_and_isolation(VertexState& s, const std::vector<int>& cover_senders) {
  if (!cover_senders.empty()) {
    std::vector<int> keep_n;
    std::vector<long> keep_l;
    keep_n.reserve(s.neighbors.size());
    keep_l.reserve(s.neighbors.size());
    size_t c = 0;
    for (size_t i = 0; i < s.neighbors.size(); ++i) {
      if (c < cover_senders.size() && cover_senders[c] < s.neighbors[i])
        bug(vtx(s) + ": cover message from non-neighbor " + std::to_string(cover_senders[c]));
      if (c < cover_senders.size() && cover_senders[c] == s.neighbors[i]) {
        ++c;
        continue;
      }
      keep_n.push_back(s.neighbors[i]);
      if (i < s.neighbor_levels.size()) keep_l.push_back(s.neighbor_levels[i]);
    }
    if (c != cover_senders.size())
      bug(vtx(s) + ": cover message from non-neighbor " + std::to_string(cover_senders[c]));
    s.neighbors = std::move(keep_n);
    s.neighbor_levels = std::move(keep_l);
  }
  if (s.neighbors.empty()) {
    s.status = VertexStatus::NotInCover;
    return VertexDecision::NotInCover;
  }
  return VertexDecision::ContinueActive;
}

long long iteration_bound(long long degree, const ProtocolParams& p, const Rat& analysis_K) {
  if (analysis_K <= 1) throw std::invalid_argument("iteration_bound: K must exceed 1");
  long log_term = degree <= 1 ? 0 : ceil_log_up(analysis_K, Rat(degree));
  Rat bound = Rat(p.z) * (analysis_K / p.gamma + log_term);
  return ceil_rat(bound).convert_to<long long>();
}

}  // namespace mwvc
