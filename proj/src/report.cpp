#include "mwvc/report.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace mwvc {

using nlohmann::ordered_json;

ordered_json report_json(const WeightedGraph& g, const RunResult& res,
                         const Verdict& verdict, const ExactCover* oracle) {
  const ResolvedConfig& cfg = res.config;
  ordered_json j;
  j["type"] = "mwvc-report-v1";

  Int total_weight;
  for (const Int& w : g.weights) total_weight += w;
  j["graph"] = {{"n", g.n},
                {"m", g.m()},
                {"max_degree", static_cast<long long>(g.max_degree())},
                {"total_weight", total_weight.str()}};

  j["config"] = {{"epsilon", to_frac_string(cfg.params.epsilon)},
                 {"epsilon_prime", to_frac_string(cfg.params.epsilon_prime)},
                 {"gamma", to_frac_string(cfg.params.gamma)},
                 {"gamma_mode", gamma_mode_name(cfg.gamma_mode, cfg.eps_power_q)},
                 {"z", cfg.params.z},
                 {"analysis_K", to_frac_string(cfg.analysis_K)},
                 {"iteration_bound_max", cfg.bound_max},
                 {"iteration_cap", cfg.iteration_cap},
                 {"threads", cfg.threads},
                 {"record_trace", cfg.record_trace}};

  ordered_json result;
  result["cover"] = res.cover;
  result["cover_weight"] = to_frac_string(res.cover_weight);
  result["dual_sum"] = to_frac_string(res.dual_sum);
  result["max_iterations"] = res.metrics.max_iterations;
  result["rounds"] = res.metrics.rounds;
  result["messages"] = {{"level", res.metrics.messages.level},
                        {"request", res.metrics.messages.request},
                        {"budget", res.metrics.messages.budget},
                        {"cover", res.metrics.messages.cover},
                        {"total", res.metrics.messages.total()}};
  result["max_payload_bits"] = res.metrics.max_payload_bits;
  result["max_active_level"] = res.metrics.max_active_level;
  result["claim1_checks"] = res.metrics.claim1_checks;
  result["dichotomy_checks"] = res.metrics.dichotomy_checks;
  ordered_json weights = ordered_json::array();
  for (const Rat& w : res.final_weights) weights.push_back(to_frac_string(w));
  result["final_weights"] = std::move(weights);
  result["levels"] = res.levels;
  result["iterations"] = res.iterations;
  j["result"] = std::move(result);

  ordered_json checks = ordered_json::array();
  for (const Check& c : verdict.checks) {
    ordered_json entry = {{"name", c.name}, {"pass", c.pass}};
    if (!c.witness.empty()) entry["witness"] = c.witness;
    checks.push_back(std::move(entry));
  }
  ordered_json figures;
  for (const auto& [name, value] : verdict.figures) figures[name] = to_frac_string(value);
  j["verdicts"] = {{"all_pass", verdict.all_pass()},
                   {"checks", std::move(checks)},
                   {"figures", std::move(figures)}};

  if (oracle != nullptr) {
    j["oracle"] = {{"opt_weight", oracle->weight.str()}, {"witness", oracle->vertices}};
  }
  return j;
}

std::string render_report(const ordered_json& report) { return report.dump(2) + "\n"; }

ordered_json parse_report(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument("report: not a JSON object");
  if (j.value("type", std::string()) != "mwvc-report-v1")
    throw std::invalid_argument("report: unknown document type");
  return j;
}

namespace {

// Pull j[outer][inner], throwing invalid_argument when the path is absent.
const ordered_json& field(const ordered_json& j, const char* outer, const char* inner) {
  if (!j.contains(outer) || !j[outer].is_object() || !j[outer].contains(inner))
    throw std::invalid_argument(std::string("report: missing field ") + outer + "." + inner);
  return j[outer][inner];
}

template <typename T>
void expect(Verdict& v, const std::string& name, const T& stored, const T& fresh) {
  if (stored == fresh) {
    v.add_pass(name);
  } else {
    std::ostringstream w;
    w << "stored " << ordered_json(stored).dump() << " vs replayed "
      << ordered_json(fresh).dump();
    v.add_fail(name, w.str());
  }
}

}  // namespace

Verdict check_report_consistency(const ordered_json& report, const WeightedGraph& g,
                                 const RunResult& fresh) {
  Verdict v;
  expect(v, "report_graph_n", field(report, "graph", "n").get<int>(), g.n);
  expect(v, "report_graph_m", field(report, "graph", "m").get<long long>(), g.m());
  expect(v, "report_epsilon", field(report, "config", "epsilon").get<std::string>(),
         to_frac_string(fresh.config.params.epsilon));
  expect(v, "report_gamma", field(report, "config", "gamma").get<std::string>(),
         to_frac_string(fresh.config.params.gamma));
  expect(v, "report_z", field(report, "config", "z").get<long>(), fresh.config.params.z);
  expect(v, "report_cover", field(report, "result", "cover").get<std::vector<int>>(),
         fresh.cover);
  expect(v, "report_cover_weight",
         field(report, "result", "cover_weight").get<std::string>(),
         to_frac_string(fresh.cover_weight));
  expect(v, "report_dual_sum", field(report, "result", "dual_sum").get<std::string>(),
         to_frac_string(fresh.dual_sum));
  expect(v, "report_max_iterations",
         field(report, "result", "max_iterations").get<long long>(),
         fresh.metrics.max_iterations);
  expect(v, "report_rounds", field(report, "result", "rounds").get<long long>(),
         fresh.metrics.rounds);

  std::vector<std::string> fresh_weights;
  for (const Rat& w : fresh.final_weights) fresh_weights.push_back(to_frac_string(w));
  expect(v, "report_final_weights",
         field(report, "result", "final_weights").get<std::vector<std::string>>(),
         fresh_weights);
  expect(v, "report_levels", field(report, "result", "levels").get<std::vector<long>>(),
         fresh.levels);
  expect(v, "report_iterations",
         field(report, "result", "iterations").get<std::vector<long long>>(),
         fresh.iterations);

  bool stored_pass = field(report, "verdicts", "all_pass").get<bool>();
  if (stored_pass) {
    v.add_pass("report_all_pass");
  } else {
    v.add_fail("report_all_pass", "stored report records a failed check");
  }
  return v;
}

std::string summary_line(const RunResult& res) {
  const Rat ratio_bound = (2 + res.config.params.epsilon) * res.dual_sum;
  std::ostringstream out;
  out << "cover_weight=" << to_frac_string(res.cover_weight)
      << " dual_sum=" << to_frac_string(res.dual_sum)
      << " ratio_bound=" << to_frac_string(ratio_bound)
      << " iterations=" << res.metrics.max_iterations
      << " rounds=" << res.metrics.rounds
      << " max_payload_bits=" << res.metrics.max_payload_bits;
  return out.str();
}

}  // namespace mwvc
