#include "mwvc/cli.hpp"

#include "mwvc/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mwvc {

namespace {

using nlohmann::ordered_json;

constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMissingFile = 3;
constexpr int kExitMalformed = 4;
constexpr int kExitSimulation = 5;

struct CliError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitMissingFile, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitMissingFile, "cannot write " + path};
  out << content;
  if (!out) throw CliError{kExitMissingFile, "cannot write " + path};
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

GraphFamily family_from_name(const std::string& name) {
  if (name == "star") return GraphFamily::Star;
  if (name == "clique") return GraphFamily::Clique;
  if (name == "path") return GraphFamily::Path;
  if (name == "gnp") return GraphFamily::Gnp;
  if (name == "bounded") return GraphFamily::BoundedDegreeRandom;
  throw std::invalid_argument("unknown graph family: " + name);
}

WeightRule weight_rule_from_name(const std::string& name) {
  if (name == "unit") return WeightRule::Unit;
  if (name == "uniform") return WeightRule::UniformInt;
  throw std::invalid_argument("unknown weight rule: " + name);
}

// Raw generator flags shared by `run --gen`, `gen`, and sweep spec entries.
struct GenFlags {
  std::string family;
  int n = 0;
  int delta = 0;
  std::string p;
  int max_degree = 0;
  std::string weights = "unit";
  long long w_max = 1;
  uint64_t seed = 0;
};

GenSpec to_gen_spec(const GenFlags& f) {
  GenSpec spec;
  spec.family = family_from_name(f.family);
  spec.n = f.n;
  spec.delta = f.delta;
  if (!f.p.empty()) spec.p = parse_rat(f.p);
  spec.max_degree = f.max_degree;
  spec.weights = weight_rule_from_name(f.weights);
  spec.w_max = f.w_max;
  spec.seed = f.seed;
  return spec;
}

void add_gen_flags(CLI::App* cmd, GenFlags& f, bool family_flag) {
  cmd->add_option(family_flag ? "--family" : "--gen", f.family,
                  "graph family: star|clique|path|gnp|bounded");
  cmd->add_option("--n", f.n, "vertex count (clique/path/gnp/bounded)");
  cmd->add_option("--delta", f.delta, "leaf count for star graphs");
  cmd->add_option("--p", f.p, "edge probability for gnp, exact rational");
  cmd->add_option("--max-degree", f.max_degree, "degree cap for bounded family");
  cmd->add_option("--weights", f.weights, "weight rule: unit|uniform");
  cmd->add_option("--w-max", f.w_max, "max weight for uniform rule");
  cmd->add_option("--seed", f.seed, "generator seed");
}

// Accepts the named modes plus any explicit rational in (0,1).
void apply_gamma(RunConfig& cfg, const std::string& text) {
  try {
    cfg.gamma_mode = parse_gamma_mode(text, cfg.eps_power_q);
    return;
  } catch (const std::invalid_argument&) {
  }
  try {
    cfg.gamma_fixed = parse_rat(text);
    cfg.gamma_mode = GammaMode::Fixed;
  } catch (const std::invalid_argument&) {
    throw CliError{kExitUsage, "unrecognized --gamma value: " + text};
  }
}

Rat two_approx_epsilon(const WeightedGraph& g) {
  return Rat(Int(1), Int(g.n) * g.max_weight() + 1);
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string text;
  for (const std::string& line : lines) {
    text += line;
    text += '\n';
  }
  return text;
}

void print_failures(const Verdict& v, std::ostream& err) {
  for (const Check& c : v.checks) {
    if (c.pass) continue;
    err << "FAIL " << c.name;
    if (!c.witness.empty()) err << ": " << c.witness;
    err << '\n';
  }
}

// ---- run ----------------------------------------------------------------

struct RunFlags {
  std::string graph_file;
  GenFlags gen;
  std::string epsilon;
  bool two_approx = false;
  std::string gamma = "auto";
  std::string analysis_k;
  long long iteration_cap = 0;
  int threads = 1;
  std::string trace_file;
  std::string report_file;
  bool verify = true;
  bool oracle = false;
};

WeightedGraph load_or_generate(const std::string& graph_file, const GenFlags& gen) {
  if (!graph_file.empty() && !gen.family.empty())
    throw CliError{kExitUsage, "--graph and --gen are mutually exclusive"};
  if (!graph_file.empty()) {
    std::string text = read_file(graph_file);
    try {
      return parse_graph(text);
    } catch (const ParseError& e) {
      throw CliError{kExitMalformed, graph_file + ": " + e.what()};
    }
  }
  if (gen.family.empty())
    throw CliError{kExitUsage, "one of --graph or --gen is required"};
  try {
    return generate_graph(to_gen_spec(gen));
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitUsage, e.what()};
  }
}

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err) {
  WeightedGraph g = load_or_generate(f.graph_file, f.gen);

  RunConfig cfg;
  if (f.two_approx == f.epsilon.empty()) {
    // exactly one source of epsilon
    if (f.two_approx) {
      cfg.epsilon = two_approx_epsilon(g);
    } else {
      try {
        cfg.epsilon = parse_rat(f.epsilon);
      } catch (const std::invalid_argument& e) {
        throw CliError{kExitUsage, std::string("--epsilon: ") + e.what()};
      }
    }
  } else {
    throw CliError{kExitUsage, "exactly one of --epsilon or --two-approx is required"};
  }
  apply_gamma(cfg, f.gamma);
  if (!f.analysis_k.empty()) {
    try {
      cfg.analysis_K = parse_rat(f.analysis_k);
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitUsage, std::string("--analysis-k: ") + e.what()};
    }
  }
  if (f.iteration_cap > 0) cfg.iteration_cap = f.iteration_cap;
  cfg.threads = f.threads;
  cfg.record_trace = !f.trace_file.empty();

  RunResult res = [&] {
    try {
      return run(g, cfg);
    } catch (const SimulationError& e) {
      throw CliError{kExitSimulation, e.what()};
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitUsage, e.what()};
    }
  }();

  Verdict verdict;
  if (f.verify) verdict = verify_run(g, res);
  std::optional<ExactCover> opt;
  if (f.oracle) {
    try {
      opt = exact_mwvc(g);
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitUsage, std::string("--oracle: ") + e.what()};
    }
    verdict.merge(check_ratio_vs_opt(g, res.cover, res.config.params.epsilon, *opt));
  }

  if (!f.trace_file.empty()) write_file(f.trace_file, join_lines(res.trace));
  if (!f.report_file.empty()) {
    ordered_json rep = report_json(g, res, verdict, opt ? &*opt : nullptr);
    write_file(f.report_file, render_report(rep));
  }

  print_failures(verdict, err);
  out << summary_line(res) << '\n';
  return verdict.all_pass() ? 0 : kExitVerification;
}

// ---- verify -------------------------------------------------------------

struct VerifyFlags {
  std::string trace_file;
  std::string report_file;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  std::string text = read_file(f.trace_file);
  ReplayResult rep = [&] {
    try {
      return replay(split_lines(text));
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitMalformed, f.trace_file + ": " + e.what()};
    } catch (const SimulationError& e) {
      throw CliError{kExitVerification, std::string("replay aborted: ") + e.what()};
    }
  }();
  if (!rep.ok()) {
    for (const std::string& d : rep.divergences) err << "DIVERGENCE " << d << '\n';
    return kExitVerification;
  }

  Verdict verdict = verify_run(rep.graph, rep.fresh);
  if (!f.report_file.empty()) {
    std::string rtext = read_file(f.report_file);
    try {
      ordered_json doc = parse_report(rtext);
      verdict.merge(check_report_consistency(doc, rep.graph, rep.fresh));
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitMalformed, f.report_file + ": " + e.what()};
    }
  }

  print_failures(verdict, err);
  if (!verdict.all_pass()) return kExitVerification;
  out << "verified: " << rep.records_checked << " trace records, "
      << verdict.checks.size() << " checks passed\n";
  return 0;
}

// ---- gen ----------------------------------------------------------------

int cmd_gen(const GenFlags& f, const std::string& out_file, std::ostream& out) {
  WeightedGraph g = [&] {
    try {
      return generate_graph(to_gen_spec(f));
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitUsage, e.what()};
    }
  }();
  std::string text = serialize_graph(g);
  if (out_file.empty()) {
    out << text;
  } else {
    write_file(out_file, text);
  }
  return 0;
}

// ---- sweep --------------------------------------------------------------

struct SweepTask {
  GenFlags gen;
  std::string epsilon;
  std::string gamma;
};

struct SweepPlan {
  bool verify = true;
  bool oracle = false;
  std::vector<SweepTask> tasks;
};

// Spec file: {"verify"?: bool, "oracle"?: bool, "runs": [entry...]} where an
// entry carries generator fields plus "seeds", "epsilons", "gamma_modes"
// arrays; the cross product expands in that nesting order.
SweepPlan parse_sweep_spec(const std::string& text, const std::string& path) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw CliError{kExitMalformed, path + ": not a JSON object"};
  SweepPlan plan;
  try {
    plan.verify = doc.value("verify", true);
    plan.oracle = doc.value("oracle", false);
    for (const ordered_json& entry : doc.value("runs", ordered_json::array())) {
      GenFlags base;
      base.family = entry.at("family").get<std::string>();
      base.n = entry.value("n", 0);
      base.delta = entry.value("delta", 0);
      base.p = entry.value("p", std::string());
      base.max_degree = entry.value("max_degree", 0);
      base.weights = entry.value("weights", std::string("unit"));
      base.w_max = entry.value("w_max", 1ll);
      std::vector<uint64_t> seeds =
          entry.value("seeds", std::vector<uint64_t>{0});
      std::vector<std::string> epsilons =
          entry.at("epsilons").get<std::vector<std::string>>();
      std::vector<std::string> modes = entry.value(
          "gamma_modes", std::vector<std::string>{"auto"});
      for (uint64_t seed : seeds) {
        for (const std::string& eps : epsilons) {
          for (const std::string& mode : modes) {
            SweepTask task;
            task.gen = base;
            task.gen.seed = seed;
            task.epsilon = eps;
            task.gamma = mode;
            plan.tasks.push_back(std::move(task));
          }
        }
      }
    }
  } catch (const ordered_json::exception& e) {
    throw CliError{kExitMalformed, path + ": " + e.what()};
  }
  return plan;
}

constexpr const char* kCsvHeader =
    "family,n,delta,epsilon,gamma_mode,gamma,z,K,max_iterations,bound,rounds,"
    "cover_weight,dual_sum,ratio_vs_dual,opt_if_available,messages,max_payload_bits";

std::string sweep_row(const SweepTask& task, bool verify, bool oracle) {
  WeightedGraph g = [&] {
    try {
      return generate_graph(to_gen_spec(task.gen));
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitMalformed, std::string("sweep entry: ") + e.what()};
    }
  }();
  RunConfig cfg;
  try {
    cfg.epsilon = parse_rat(task.epsilon);
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitMalformed, std::string("sweep epsilon: ") + e.what()};
  }
  apply_gamma(cfg, task.gamma);
  RunResult res = [&] {
    try {
      return run(g, cfg);
    } catch (const SimulationError& e) {
      throw CliError{kExitSimulation, e.what()};
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitMalformed, std::string("sweep config: ") + e.what()};
    }
  }();

  if (verify) {
    Verdict v = verify_run(g, res);
    if (!v.all_pass()) {
      std::string detail;
      for (const Check& c : v.checks)
        if (!c.pass) detail += " " + c.name;
      throw CliError{kExitVerification,
                     "verification failed for family=" + task.gen.family +
                         " seed=" + std::to_string(task.gen.seed) +
                         " epsilon=" + task.epsilon + " gamma=" + task.gamma +
                         ":" + detail};
    }
  }
  std::string opt_field;
  if (oracle && g.n <= 24) opt_field = exact_mwvc(g).weight.str();

  const ResolvedConfig& rc = res.config;
  std::ostringstream row;
  row << task.gen.family << ',' << g.n << ','
      << g.max_degree() << ',' << to_frac_string(rc.params.epsilon) << ','
      << gamma_mode_name(rc.gamma_mode, rc.eps_power_q) << ','
      << to_frac_string(rc.params.gamma) << ',' << rc.params.z << ','
      << to_frac_string(rc.analysis_K) << ',' << res.metrics.max_iterations << ','
      << rc.bound_max << ',' << res.metrics.rounds << ','
      << to_frac_string(res.cover_weight) << ',' << to_frac_string(res.dual_sum)
      << ',';
  if (res.dual_sum != 0) row << to_frac_string(res.cover_weight / res.dual_sum);
  row << ',' << opt_field << ',' << res.metrics.messages.total() << ','
      << res.metrics.max_payload_bits;
  return row.str();
}

struct SweepFlags {
  std::string spec_file;
  std::string out_file;
  int jobs = 1;
};

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  SweepPlan plan = parse_sweep_spec(read_file(f.spec_file), f.spec_file);

  std::vector<std::string> rows(plan.tasks.size());
  std::vector<std::exception_ptr> errors(plan.tasks.size());
  int jobs = std::max(1, f.jobs);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= plan.tasks.size()) return;
      try {
        rows[i] = sweep_row(plan.tasks[i], plan.verify, plan.oracle);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 1 || plan.tasks.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  std::string csv = std::string(kCsvHeader) + "\r\n";
  for (const std::string& row : rows) csv += row + "\r\n";
  if (f.out_file.empty()) {
    out << csv;
  } else {
    write_file(f.out_file, csv);
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"distributed minimum weight vertex cover simulator"};
  app.require_subcommand(1);

  RunFlags rf;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate one graph");
  run_cmd->add_option("--graph", rf.graph_file, "graph file in wvc format");
  add_gen_flags(run_cmd, rf.gen, false);
  run_cmd->add_option("--epsilon", rf.epsilon, "approximation slack, exact rational");
  run_cmd->add_flag("--two-approx", rf.two_approx,
                    "set epsilon to 1/(n*W_max+1) for a 2-approximation");
  run_cmd->add_option("--gamma", rf.gamma,
                      "auto|half|eps-power:q|bcs or an explicit rational");
  run_cmd->add_option("--analysis-k", rf.analysis_k, "analysis constant K > 1");
  run_cmd->add_option("--iteration-cap", rf.iteration_cap, "hard iteration limit");
  run_cmd->add_option("--threads", rf.threads, "engine worker threads");
  run_cmd->add_option("--trace", rf.trace_file, "write the message trace here");
  run_cmd->add_option("--report", rf.report_file, "write the run report here");
  run_cmd->add_flag("--verify,!--no-verify", rf.verify, "check all certificates");
  run_cmd->add_flag("--oracle", rf.oracle, "compare against the exact optimum");

  VerifyFlags vf;
  CLI::App* verify_cmd = app.add_subcommand("verify", "replay and check artifacts");
  verify_cmd->add_option("--trace", vf.trace_file, "trace file to replay")->required();
  verify_cmd->add_option("--report", vf.report_file, "report file to cross-check");

  GenFlags gf;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a graph file");
  add_gen_flags(gen_cmd, gf, true);
  gen_cmd->add_option("--out", gen_out, "output path (stdout when omitted)");

  SweepFlags sf;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run an experiment spec to CSV");
  sweep_cmd->add_option("--spec", sf.spec_file, "experiment spec JSON")->required();
  sweep_cmd->add_option("--out", sf.out_file, "CSV output path (stdout when omitted)");
  sweep_cmd->add_option("--jobs", sf.jobs, "parallel runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(run_cmd)) return cmd_run(rf, out, err);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(vf, out, err);
    if (app.got_subcommand(gen_cmd)) return cmd_gen(gf, gen_out, out);
    return cmd_sweep(sf, out);
  } catch (const CliError& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  }
}

}  // namespace mwvc
