#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dse/cli/cli.hpp"

namespace dse::cli {

namespace {

void emit(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

// Raw flag values; a field only overrides the config when its flag was given.
struct Flags {
  std::string config, mode, heuristic, output, csv, solver;
  int budget = 0, trials = 0, domain_bits = 0, jobs = 0;
  double egt_seconds = 0;
  std::uint64_t seed = 0;
  CLI::Option *o_mode = nullptr, *o_heuristic = nullptr, *o_output = nullptr, *o_csv = nullptr,
              *o_solver = nullptr, *o_budget = nullptr, *o_trials = nullptr, *o_bits = nullptr,
              *o_jobs = nullptr, *o_egt_seconds = nullptr, *o_seed = nullptr;

  void add_common(CLI::App* app) {
    app->add_option("--config", config, "JSON file with default field values")->check(CLI::ExistingFile);
    o_mode = app->add_option("--mode", mode, "concolic or egt");
    o_solver = app->add_option("--solver", solver, "builtin or smt (command from DSE_SOLVER_CMD)");
    o_bits = app->add_option("--domain-bits", domain_bits, "bit width of input values");
    o_budget = app->add_option("--budget", budget, "executions (concolic) or selections (egt) per run");
    o_egt_seconds = app->add_option("--egt-seconds", egt_seconds, "wall-clock EGT budget instead of selections");
    o_seed = app->add_option("--seed", seed, "master seed");
    o_output = app->add_option("-o,--output", output, "JSON output path (default stdout)");
  }
  void add_trials(CLI::App* app) {
    o_trials = app->add_option("--trials", trials, "independent runs");
    o_jobs = app->add_option("-j,--jobs", jobs, "runs in parallel");
    o_csv = app->add_option("--csv", csv, "coverage curve export");
  }

  nlohmann::json config_json() const { return config.empty() ? nlohmann::json::object() : load_json_file(config); }

  RunSpec spec(const nlohmann::json& cfg) const {
    RunSpec s;
    apply_json(s, cfg);
    if (o_mode && o_mode->count()) s.mode = parse_mode(mode);
    if (o_heuristic && o_heuristic->count()) s.heuristic = heuristic;
    if (o_output && o_output->count()) s.output = output;
    if (o_csv && o_csv->count()) s.csv = csv;
    if (o_solver && o_solver->count()) s.backend = parse_backend(solver);
    if (o_budget && o_budget->count()) s.budget = budget;
    if (o_trials && o_trials->count()) s.trials = trials;
    if (o_bits && o_bits->count()) s.domain_bits = domain_bits;
    if (o_jobs && o_jobs->count()) s.jobs = jobs;
    if (o_egt_seconds && o_egt_seconds->count()) s.egt_seconds = egt_seconds;
    if (o_seed && o_seed->count()) s.seed = seed;
    return s;
  }
};

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic symbolic execution with learned search heuristics"};
  app.require_subcommand(1);

  // run
  Flags run_f;
  std::string run_program;
  CLI::App* run = app.add_subcommand("run", "run one heuristic on a program");
  run->add_option("program", run_program, "program file");
  run_f.add_common(run);
  run_f.add_trials(run);
  run_f.o_heuristic = run->add_option("--heuristic", run_f.heuristic, "heuristic name");

  // learn
  Flags learn_f;
  std::string learn_program, theta_out, log_out;
  int n = 0, K = 0, check_trials = 0, max_iter = 0, par = 0;
  bool strict = false;
  CLI::App* lrn = app.add_subcommand("learn", "learn heuristic parameters for a program");
  lrn->add_option("program", learn_program, "program file");
  learn_f.add_common(lrn);
  lrn->add_option("--theta-out", theta_out, "where to write the learned parameters")->default_val("theta.json");
  lrn->add_option("--log", log_out, "JSON-lines iteration log");
  auto* o_n = lrn->add_option("-n,--samples", n, "parameter samples per iteration");
  auto* o_k = lrn->add_option("-K,--shortlist", K, "samples re-checked per iteration");
  auto* o_ct = lrn->add_option("--check-trials", check_trials, "runs per shortlisted sample");
  auto* o_mi = lrn->add_option("--max-iterations", max_iter, "iteration cap");
  auto* o_par = lrn->add_option("-j,--parallelism", par, "evaluations in parallel");
  auto* o_strict = lrn->add_flag("--strict-convergence", strict, "stop only when the best average drops");

  // compare
  Flags cmp_f;
  std::vector<std::string> cmp_programs, cmp_heuristics;
  CLI::App* cmp = app.add_subcommand("compare", "compare heuristics over programs");
  cmp->add_option("programs", cmp_programs, "program files")->required();
  cmp_f.add_common(cmp);
  cmp_f.add_trials(cmp);
  cmp->add_option("--heuristics", cmp_heuristics, "heuristic names")->delimiter(',')->required();

  // report-features
  std::string theta_path;
  int top_k = 10;
  bool as_json = false;
  std::string rf_output;
  CLI::App* rf = app.add_subcommand("report-features", "list the strongest learned weights");
  rf->add_option("theta", theta_path, "parameter file")->required();
  rf->add_option("-k,--top", top_k, "entries per sign")->default_val(10);
  rf->add_flag("--json", as_json, "JSON instead of a table");
  rf->add_option("-o,--output", rf_output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      nlohmann::json cfg = run_f.config_json();
      RunSpec s = run_f.spec(cfg);
      if (!run_program.empty()) s.program = run_program;
      emit(cmd_run(s), s.output, out);
    } else if (lrn->parsed()) {
      nlohmann::json cfg = learn_f.config_json();
      RunSpec s = learn_f.spec(cfg);
      if (!learn_program.empty()) s.program = learn_program;
      s.validate();
      learn::LearnConfig lc;
      if (cfg.contains("learn")) apply_json(lc, cfg["learn"]);
      if (o_n->count()) lc.n = n;
      if (o_k->count()) lc.K = K;
      if (o_ct->count()) lc.trials = check_trials;
      if (o_mi->count()) lc.max_iterations = max_iter;
      if (o_par->count()) lc.parallelism = par;
      if (o_strict->count()) lc.strict_convergence = strict;
      lc.seed = s.seed;
      lc.eval.mode = s.mode;
      lc.eval.budget = s.budget;
      lc.eval.egt_seconds = s.egt_seconds;
      lc.eval.backend = s.backend;
      lc.eval.domain_bits = s.domain_bits;
      learn::OptResult r = cmd_learn(s.program, lc, theta_out, log_out);
      nlohmann::json j = learn::to_json(r);
      j["mode"] = to_string(s.mode);
      emit(j, s.output, out);
    } else if (cmp->parsed()) {
      nlohmann::json cfg = cmp_f.config_json();
      RunSpec s = cmp_f.spec(cfg);
      emit(to_json(cmd_compare(cmp_programs, cmp_heuristics, s), s), s.output, out);
    } else if (rf->parsed()) {
      heuristics::ParamVector theta;
      try {
        theta = heuristics::load_theta(theta_path);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      FeatureReport r = cmd_report_features(theta, top_k);
      if (as_json) {
        emit(to_json(r), rf_output, out);
      } else if (rf_output.empty()) {
        out << format(r);
      } else {
        std::ofstream f(rf_output, std::ios::binary);
        if (!f) throw UsageError("cannot write " + rf_output);
        f << format(r);
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace dse::cli
