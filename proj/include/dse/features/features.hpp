#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dse/concolic/concolic.hpp"
#include "dse/egt/egt.hpp"

namespace dse::features {

inline constexpr int kBranchFeatures = 40;
inline constexpr int kStateFeatures = 26;

using FeatureVector = std::vector<std::uint8_t>;

enum class Mode : std::uint8_t { Concolic, Egt };
int feature_count(Mode m);

struct CatalogEntry {
  int index;  // 1-based, as used in reports ("#n")
  const char* description;
  bool is_static;
};

const std::vector<CatalogEntry>& branch_catalog();
const std::vector<CatalogEntry>& state_catalog();
const std::vector<CatalogEntry>& catalog(Mode m);

/// Derived run data for branch features of the latest path. Build one per
/// selection; extraction is read-only.
class BranchFeatureContext {
 public:
  explicit BranchFeatureContext(const concolic::ConcolicView& view);

  /// Features of position i (1-based) of the latest path.
  FeatureVector extract(int i) const;

  const concolic::ConcolicView& view() const { return view_; }
  /// Distance from each arm to the nearest uncovered arm (nullopt when none
  /// is reachable), indexed by branch id.
  const std::vector<std::optional<int>>& distance_to_uncovered() const { return dist_; }

 private:
  concolic::ConcolicView view_;
  std::vector<std::optional<int>> dist_;
  std::vector<int> uncovered_per_function_;
  int max_uncovered_ = 0;
  int max_occurrences_ = 0;
  int min_occurrences_ = 0;
  int origin_ = 0;                     // index negated to produce the latest path
  int chosen_function_ = -1;           // function of the last negated branch
  int recent_function_ = -1;           // function of the last sited condition
};

/// Convenience wrapper over BranchFeatureContext::extract.
FeatureVector extract_branch_features(const BranchFeatureContext& ctx, int i);

/// Pool-relative data for state features. Build one per selection.
class StateFeatureContext {
 public:
  explicit StateFeatureContext(const egt::EgtView& view);

  /// Features of the state at pool position `pos`.
  FeatureVector extract(size_t pos) const;

  const egt::EgtView& view() const { return view_; }

 private:
  egt::EgtView view_;
  std::vector<std::vector<std::uint8_t>> percentile_;  // rows 20..26, per pool position
  std::vector<int> uncovered_per_function_;
  int max_uncovered_ = 0;
  std::int64_t max_traversals_ = 0;
  std::int64_t min_traversals_ = 0;
  std::vector<std::optional<int>> from_selected_;  // distances from the just-selected branch
};

FeatureVector extract_state_features(const StateFeatureContext& ctx, size_t pos);

/// Number of states flagged by a 10% percentile row in a pool of n.
int percentile_count(size_t n);

/// Positions of the ceil(0.1 n) smallest keys; ties go to the lower
/// tie-break value.
std::vector<size_t> lowest_fraction(const std::vector<std::int64_t>& keys,
                                    const std::vector<std::int64_t>& tiebreak);

}  // namespace dse::features
