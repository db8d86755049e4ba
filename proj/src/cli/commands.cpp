#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dse/cli/cli.hpp"
#include "dse/concolic/concolic.hpp"
#include "dse/egt/egt.hpp"

namespace dse::cli {

features::Mode parse_mode(const std::string& s) {
  if (s == "concolic") return features::Mode::Concolic;
  if (s == "egt") return features::Mode::Egt;
  throw UsageError("unknown mode '" + s + "' (expected concolic or egt)");
}

const char* to_string(features::Mode m) { return m == features::Mode::Concolic ? "concolic" : "egt"; }

solver::Backend parse_backend(const std::string& s) {
  if (s == "builtin") return solver::Backend::Builtin;
  if (s == "smt" || s == "external") return solver::Backend::External;
  throw UsageError("unknown solver '" + s + "' (expected builtin or smt)");
}

const char* to_string(solver::Backend b) { return b == solver::Backend::Builtin ? "builtin" : "smt"; }

void RunSpec::validate(bool need_program) const {
  if (need_program) {
    if (program.empty()) throw UsageError("no program given");
    if (!std::filesystem::is_regular_file(program)) throw UsageError("program file not found: " + program);
  }
  if (trials < 1) throw UsageError("trials must be at least 1");
  if (budget < 1) throw UsageError("budget must be at least 1");
  if (egt_seconds < 0) throw UsageError("egt-seconds must not be negative");
  if (jobs < 1) throw UsageError("jobs must be at least 1");
  if (domain_bits < 1 || domain_bits > 32) throw UsageError("domain-bits must be in 1..32");
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

void apply_json(RunSpec& s, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "program") s.program = field<std::string>(j, "program");
    else if (key == "mode") s.mode = parse_mode(field<std::string>(j, "mode"));
    else if (key == "heuristic") s.heuristic = field<std::string>(j, "heuristic");
    else if (key == "budget") s.budget = field<int>(j, "budget");
    else if (key == "egt_seconds") s.egt_seconds = field<double>(j, "egt_seconds");
    else if (key == "trials") s.trials = field<int>(j, "trials");
    else if (key == "seed") s.seed = field<std::uint64_t>(j, "seed");
    else if (key == "output") s.output = field<std::string>(j, "output");
    else if (key == "csv") s.csv = field<std::string>(j, "csv");
    else if (key == "solver") s.backend = parse_backend(field<std::string>(j, "solver"));
    else if (key == "domain_bits") s.domain_bits = field<int>(j, "domain_bits");
    else if (key == "jobs") s.jobs = field<int>(j, "jobs");
    else if (key == "learn") continue;
    else throw UsageError("unknown config field '" + key + "'");
  }
}

void apply_json(learn::LearnConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("learn config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n") c.n = field<int>(j, "n");
    else if (key == "K") c.K = field<int>(j, "K");
    else if (key == "check_trials") c.trials = field<int>(j, "check_trials");
    else if (key == "max_iterations") c.max_iterations = field<int>(j, "max_iterations");
    else if (key == "strict_convergence") c.strict_convergence = field<bool>(j, "strict_convergence");
    else if (key == "parallelism") c.parallelism = field<int>(j, "parallelism");
    else throw UsageError("unknown learn config field '" + key + "'");
  }
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return learn::derive_seed(master, 0, 3, trial);
}

namespace {

lang::Program load_program(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("program file not found: " + path);
  try {
    return lang::parse_file(path);
  } catch (const lang::ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const lang::SemanticError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Builds the heuristic up front so a bad name is a usage error, not a
// failure inside a worker thread.
void check_heuristic(features::Mode mode, const std::string& name) {
  try {
    if (mode == features::Mode::Concolic) {
      heuristics::make_concolic(name);
    } else {
      heuristics::make_egt(name);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

bool has_error_bug(const std::vector<concolic::BugRecord>& bugs) {
  return std::any_of(bugs.begin(), bugs.end(),
                     [](const concolic::BugRecord& b) { return b.event.kind == concolic::BugKind::Error; });
}

const char* curve_axis(const RunSpec& s) {
  if (s.mode == features::Mode::Concolic) return "execution";
  return s.egt_seconds > 0 ? "second" : "iteration";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

}  // namespace

TrialResult run_trial(const lang::Program& p, const lang::Cfg& cfg, const RunSpec& spec,
                      const std::string& heuristic, std::uint64_t seed) {
  auto solver = solver::make_solver(spec.backend, spec.domain_bits);
  TrialResult out;
  if (spec.mode == features::Mode::Concolic) {
    auto h = heuristics::make_concolic(heuristic);
    concolic::ConcolicOptions o;
    o.budget = spec.budget;
    o.seed = seed;
    concolic::RunReport r = concolic::run_concolic(p, cfg, *h, *solver, o);
    out.report = concolic::to_json(p, r);
    out.covered = r.covered;
    for (size_t i = 0; i < r.curve.size(); ++i) out.curve.emplace_back(static_cast<double>(i + 1), r.curve[i]);
    out.bug = has_error_bug(r.bugs);
  } else {
    auto h = heuristics::make_egt(heuristic);
    egt::EgtOptions o;
    o.seed = seed;
    if (spec.egt_seconds > 0) {
      o.budget_seconds = spec.egt_seconds;
    } else {
      o.max_iterations = spec.budget;
    }
    egt::EgtReport r = egt::run_egt(p, cfg, *h, *solver, o);
    out.report = egt::to_json(p, r);
    out.covered = r.covered;
    for (const auto& c : r.curve) out.curve.emplace_back(c.time, c.coverage);
    out.bug = has_error_bug(r.bugs);
  }
  out.report["program"] = spec.program;
  out.report["heuristic"] = heuristic;
  return out;
}

std::vector<TrialResult> run_trials(const lang::Program& p, const RunSpec& spec,
                                    const std::string& heuristic) {
  check_heuristic(spec.mode, heuristic);
  lang::Cfg cfg = lang::build_cfg(p);
  std::vector<TrialResult> out(static_cast<size_t>(spec.trials));
  learn::parallel_for(spec.trials, spec.jobs, [&](int t) {
    out[static_cast<size_t>(t)] = run_trial(p, cfg, spec, heuristic, trial_seed(spec.seed, t));
  });
  return out;
}

std::string curves_csv(const std::vector<std::vector<std::pair<double, int>>>& curves,
                       const std::string& x_name) {
  std::ostringstream os;
  os << "trial," << x_name << ",coverage\n";
  for (size_t t = 0; t < curves.size(); ++t) {
    for (const auto& [x, c] : curves[t]) os << t << ',' << x << ',' << c << '\n';
  }
  return os.str();
}

nlohmann::json cmd_run(const RunSpec& spec) {
  spec.validate();
  lang::Program p = load_program(spec.program);
  std::vector<TrialResult> trials = run_trials(p, spec, spec.heuristic);
  nlohmann::json out = nlohmann::json::array();
  std::vector<std::vector<std::pair<double, int>>> curves;
  for (auto& t : trials) {
    out.push_back(std::move(t.report));
    curves.push_back(std::move(t.curve));
  }
  if (!spec.csv.empty()) write_text(spec.csv, curves_csv(curves, curve_axis(spec)));
  return out;
}

void summarize(HeuristicSummary& h) {
  if (h.coverage.empty()) return;
  double n = static_cast<double>(h.coverage.size());
  double sum = 0;
  for (int c : h.coverage) sum += c;
  h.mean = sum / n;
  h.max = *std::max_element(h.coverage.begin(), h.coverage.end());
  double sq = 0;
  for (int c : h.coverage) sq += (c - h.mean) * (c - h.mean);
  h.std = std::sqrt(sq / n);
}

void fill_exclusive(std::vector<HeuristicSummary>& hs) {
  std::map<lang::BranchId, int> owners;
  for (const auto& h : hs) {
    for (auto b : h.union_covered) ++owners[b];
  }
  for (auto& h : hs) {
    h.exclusive.clear();
    for (auto b : h.union_covered) {
      if (owners[b] == 1) h.exclusive.push_back(b);
    }
  }
}

CompareReport cmd_compare(const std::vector<std::string>& programs,
                          const std::vector<std::string>& heuristics, const RunSpec& spec) {
  if (programs.empty()) throw UsageError("compare needs at least one program");
  if (heuristics.empty()) throw UsageError("compare needs at least one heuristic");
  spec.validate(false);
  for (const auto& h : heuristics) check_heuristic(spec.mode, h);
  CompareReport report;
  for (const auto& path : programs) {
    lang::Program p = load_program(path);
    ProgramComparison pc;
    pc.program = path;
    pc.branches = p.branch_count();
    RunSpec s = spec;
    s.program = path;
    for (const auto& name : heuristics) {
      HeuristicSummary h;
      h.name = name;
      std::vector<char> in_union(static_cast<size_t>(p.branch_count()), 0);
      for (auto& t : run_trials(p, s, name)) {
        h.coverage.push_back(static_cast<int>(t.covered.size()));
        h.curves.push_back(std::move(t.curve));
        h.bug_trials += t.bug;
        for (auto b : t.covered) in_union[static_cast<size_t>(b)] = 1;
      }
      for (size_t b = 0; b < in_union.size(); ++b) {
        if (in_union[b]) h.union_covered.push_back(static_cast<lang::BranchId>(b));
      }
      summarize(h);
      pc.heuristics.push_back(std::move(h));
    }
    fill_exclusive(pc.heuristics);
    std::vector<size_t> order(pc.heuristics.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return pc.heuristics[a].mean > pc.heuristics[b].mean; });
    for (size_t i : order) pc.ranking.push_back(pc.heuristics[i].name);
    report.programs.push_back(std::move(pc));
  }
  if (!spec.csv.empty()) {
    std::ostringstream os;
    os << "program,heuristic,trial," << curve_axis(spec) << ",coverage\n";
    for (const auto& pc : report.programs) {
      for (const auto& h : pc.heuristics) {
        for (size_t t = 0; t < h.curves.size(); ++t) {
          for (const auto& [x, c] : h.curves[t]) os << pc.program << ',' << h.name << ',' << t << ',' << x << ',' << c << '\n';
        }
      }
    }
    write_text(spec.csv, os.str());
  }
  return report;
}

nlohmann::json to_json(const CompareReport& r, const RunSpec& spec) {
  nlohmann::json programs = nlohmann::json::array();
  for (const auto& pc : r.programs) {
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& h : pc.heuristics) {
      nlohmann::json curves = nlohmann::json::array();
      for (const auto& c : h.curves) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& [x, v] : c) pts.push_back({x, v});
        curves.push_back(std::move(pts));
      }
      hs.push_back({{"name", h.name},
                    {"coverage", h.coverage},
                    {"mean", h.mean},
                    {"max", h.max},
                    {"std", h.std},
                    {"bug_trials", h.bug_trials},
                    {"union", h.union_covered},
                    {"exclusive", h.exclusive},
                    {"curves", curves}});
    }
    programs.push_back({{"program", pc.program},
                        {"branches", pc.branches},
                        {"heuristics", hs},
                        {"ranking", pc.ranking}});
  }
  return {{"mode", to_string(spec.mode)},
          {"budget", spec.budget},
          {"trials", spec.trials},
          {"seed", spec.seed},
          {"curve_axis", curve_axis(spec)},
          {"programs", programs}};
}

FeatureReport cmd_report_features(const heuristics::ParamVector& theta, int top_k) {
  if (top_k < 0) throw UsageError("top-k must not be negative");
  FeatureReport r;
  if (static_cast<int>(theta.size()) == features::kBranchFeatures) {
    r.mode = features::Mode::Concolic;
  } else if (static_cast<int>(theta.size()) == features::kStateFeatures) {
    r.mode = features::Mode::Egt;
  } else {
    throw UsageError("theta has " + std::to_string(theta.size()) + " weights; expected " +
                     std::to_string(features::kBranchFeatures) + " (concolic) or " +
                     std::to_string(features::kStateFeatures) + " (egt)");
  }
  const auto& cat = features::catalog(r.mode);
  std::vector<RankedFeature> all;
  for (size_t i = 0; i < theta.size(); ++i) all.push_back({static_cast<int>(i) + 1, theta[i], cat[i].description});
  auto take = [&](bool positive) {
    std::vector<RankedFeature> v;
    for (const auto& f : all) {
      if (positive ? f.weight > 0 : f.weight < 0) v.push_back(f);
    }
    std::stable_sort(v.begin(), v.end(), [&](const RankedFeature& a, const RankedFeature& b) {
      return positive ? a.weight > b.weight : a.weight < b.weight;
    });
    if (static_cast<int>(v.size()) > top_k) v.resize(static_cast<size_t>(top_k));
    return v;
  };
  r.positive = take(true);
  r.negative = take(false);
  return r;
}

nlohmann::json to_json(const FeatureReport& r) {
  auto list = [](const std::vector<RankedFeature>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : v) out.push_back({{"index", f.index}, {"weight", f.weight}, {"description", f.description}});
    return out;
  };
  return {{"mode", to_string(r.mode)}, {"positive", list(r.positive)}, {"negative", list(r.negative)}};
}

std::string format(const FeatureReport& r) {
  std::ostringstream os;
  auto table = [&](const char* title, const std::vector<RankedFeature>& v) {
    os << title << '\n';
    if (v.empty()) os << "  (none)\n";
    char buf[32];
    for (const auto& f : v) {
      std::snprintf(buf, sizeof buf, "%+.4f", f.weight);
      os << "  #" << f.index << (f.index < 10 ? "  " : " ") << buf << "  " << f.description << '\n';
    }
  };
  os << "mode: " << to_string(r.mode) << '\n';
  table("positive", r.positive);
  table("negative", r.negative);
  return os.str();
}

learn::OptResult cmd_learn(const std::string& program, const learn::LearnConfig& cfg,
                           const std::string& theta_path, const std::string& log_path) {
  lang::Program p = load_program(program);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::binary);
    if (!log) throw UsageError("cannot write " + log_path);
  }
  learn::OptResult r = learn::optimize(p, cfg, [&](const learn::IterationLog& it) {
    if (log.is_open()) {
      log << learn::to_json(it).dump() << '\n';
      log.flush();
    }
  });
  if (!theta_path.empty()) heuristics::save_theta(theta_path, r.theta_max);
  return r;
}

}  // namespace dse::cli
