#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dse/heuristics/heuristics.hpp"

namespace dse::heuristics {

ParamVector load_theta(const std::string& path, int expected_length) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open parameter file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("parameter file " + path + " is not valid JSON: " + e.what());
  }
  // A learn output object carries the vector under "theta".
  if (j.is_object() && j.contains("theta")) j = j["theta"];
  if (!j.is_array()) throw std::invalid_argument("parameter file " + path + " must hold a JSON array");
  ParamVector theta;
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument("parameter file " + path + " has a non-numeric entry");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw std::invalid_argument("parameter file " + path + " has a non-finite entry");
    theta.push_back(d);
  }
  if (expected_length > 0 && theta.size() != static_cast<size_t>(expected_length)) {
    throw std::invalid_argument("parameter file " + path + " has " + std::to_string(theta.size()) +
                                " weights, expected " + std::to_string(expected_length));
  }
  return theta;
}

void save_theta(const std::string& path, const ParamVector& theta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << nlohmann::json(theta).dump() << "\n";
}

namespace {

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

void no_arg(const std::string& name, const std::string& arg) {
  if (!arg.empty()) throw std::invalid_argument("heuristic " + name + " takes no argument");
}

}  // namespace

std::unique_ptr<concolic::ConcolicHeuristic> make_concolic(const std::string& spec) {
  auto [name, arg] = split_spec(spec);
  if (name == "parametric") {
    if (arg.empty()) throw std::invalid_argument("parametric needs a parameter file: parametric:<file>");
    return parametric_concolic(load_theta(arg, features::kBranchFeatures));
  }
  if (name == "cgs") {
    int k = 2;
    if (!arg.empty()) {
      try {
        size_t used = 0;
        k = std::stoi(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
      } catch (const std::exception&) {
        throw std::invalid_argument("cgs context length must be an integer, got '" + arg + "'");
      }
    }
    return cgs(k);
  }
  no_arg(name, arg);
  if (name == "dfs") return dfs_concolic();
  if (name == "random") return random_branch();
  if (name == "cfds") return cfds();
  if (name == "gen") return gen();
  throw std::invalid_argument("unknown concolic heuristic '" + spec +
                              "' (expected parametric:<file>, dfs, random, cfds, cgs[:k], gen)");
}

std::unique_ptr<egt::EgtHeuristic> make_egt(const std::string& spec) {
  auto [name, arg] = split_spec(spec);
  if (name == "parametric") {
    if (arg.empty()) throw std::invalid_argument("parametric needs a parameter file: parametric:<file>");
    return parametric_egt(load_theta(arg, features::kStateFeatures));
  }
  if (name == "round-robin") {
    std::vector<std::unique_ptr<egt::EgtHeuristic>> parts;
    size_t start = 0;
    while (start <= arg.size()) {
      size_t comma = arg.find(',', start);
      if (comma == std::string::npos) comma = arg.size();
      std::string part = arg.substr(start, comma - start);
      if (part.empty()) throw std::invalid_argument("round-robin has an empty entry in '" + arg + "'");
      parts.push_back(make_egt(part));
      start = comma + 1;
    }
    return round_robin(std::move(parts));
  }
  no_arg(name, arg);
  if (name == "dfs") return dfs_egt();
  if (name == "bfs") return bfs_egt();
  if (name == "random-state") return random_state();
  if (name == "random-path") return random_path();
  if (name == "covnew") return covnew();
  if (name == "depth") return depth();
  if (name == "query-cost") return query_cost();
  if (name == "min-distance") return min_distance();
  if (name == "instr-count") return instr_count();
  if (name == "callpath-instr-count") return callpath_instr_count();
  throw std::invalid_argument(
      "unknown egt heuristic '" + spec +
      "' (expected parametric:<file>, dfs, bfs, random-state, random-path, covnew, depth, "
      "query-cost, min-distance, instr-count, callpath-instr-count, round-robin:<a>,<b>)");
}

}  // namespace dse::heuristics
