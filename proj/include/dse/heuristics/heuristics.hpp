#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dse/concolic/concolic.hpp"
#include "dse/egt/egt.hpp"
#include "dse/features/features.hpp"

namespace dse::heuristics {

using ParamVector = std::vector<double>;

/// θ · π. Throws std::invalid_argument on a length mismatch.
double score(const ParamVector& theta, const features::FeatureVector& fv);

/// Scores within this distance of each other are tied. It is proportional
/// to the L1 norm of theta, so rescaling theta keeps the same ties despite
/// rounding.
double tie_tolerance(const ParamVector& theta);

/// Positions whose score ties the maximum, in increasing order.
std::vector<size_t> argmax_set(const ParamVector& theta,
                               const std::vector<features::FeatureVector>& candidates);

// Concolic heuristics.
std::unique_ptr<concolic::ConcolicHeuristic> parametric_concolic(ParamVector theta);
std::unique_ptr<concolic::ConcolicHeuristic> dfs_concolic();
std::unique_ptr<concolic::ConcolicHeuristic> random_branch();
std::unique_ptr<concolic::ConcolicHeuristic> cfds();
std::unique_ptr<concolic::ConcolicHeuristic> cgs(int k = 2);
std::unique_ptr<concolic::ConcolicHeuristic> gen();

// EGT heuristics.
std::unique_ptr<egt::EgtHeuristic> parametric_egt(ParamVector theta);
std::unique_ptr<egt::EgtHeuristic> dfs_egt();
std::unique_ptr<egt::EgtHeuristic> bfs_egt();
std::unique_ptr<egt::EgtHeuristic> random_state();
std::unique_ptr<egt::EgtHeuristic> random_path();
std::unique_ptr<egt::EgtHeuristic> covnew();
std::unique_ptr<egt::EgtHeuristic> depth();
std::unique_ptr<egt::EgtHeuristic> query_cost();
std::unique_ptr<egt::EgtHeuristic> min_distance();
std::unique_ptr<egt::EgtHeuristic> instr_count();
std::unique_ptr<egt::EgtHeuristic> callpath_instr_count();
std::unique_ptr<egt::EgtHeuristic> round_robin(std::vector<std::unique_ptr<egt::EgtHeuristic>> parts);

/// CovNew selection weight of a state.
double covnew_weight(int min_distance, std::int64_t since_new_cov);

/// Reads θ as a JSON array of numbers; checks finiteness and, when
/// expected_length > 0, the length.
ParamVector load_theta(const std::string& path, int expected_length = 0);
void save_theta(const std::string& path, const ParamVector& theta);

/// Builds a heuristic from its command-line name, e.g. "cgs:3",
/// "parametric:theta.json" or "round-robin:depth,covnew". Throws
/// std::invalid_argument for unknown names or bad arguments.
std::unique_ptr<concolic::ConcolicHeuristic> make_concolic(const std::string& spec);
std::unique_ptr<egt::EgtHeuristic> make_egt(const std::string& spec);

}  // namespace dse::heuristics
