#pragma once

#include "mwvc/engine.hpp"
#include "mwvc/verify.hpp"

#include "json.hpp"

#include <string>

namespace mwvc {

// Full machine-readable record of one run: graph summary, resolved
// configuration, outcome, check verdicts, and (optionally) the exact optimum.
nlohmann::ordered_json report_json(const WeightedGraph& g, const RunResult& res,
                                   const Verdict& verdict,
                                   const ExactCover* oracle = nullptr);

// Deterministic serialization: 2-space indent, trailing newline.
std::string render_report(const nlohmann::ordered_json& report);

// Parse a report document; throws std::invalid_argument on malformed input.
nlohmann::ordered_json parse_report(const std::string& text);

// Cross-check a stored report against a freshly replayed run of the same
// graph. Field mismatches become failed checks; structural problems throw.
Verdict check_report_consistency(const nlohmann::ordered_json& report,
                                 const WeightedGraph& g, const RunResult& fresh);

// One-line human summary for the CLI: cover weight, dual sum, ratio bound,
// iterations, rounds, max payload bits.
std::string summary_line(const RunResult& res);

}  // namespace mwvc
