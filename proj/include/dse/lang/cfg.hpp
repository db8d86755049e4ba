#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dse/lang/program.hpp"

namespace dse::lang {

struct CfgEdge {
  enum class Kind : std::uint8_t { Intra, Call, Return };
  int from = 0;
  int to = 0;
  std::optional<BranchId> site;
  Kind kind = Kind::Intra;
};

/// Interprocedural control-flow graph over the program's basic blocks.
/// Call edges go to the callee entry; return edges go back to every
/// continuation block of that callee (context-insensitive).
struct Cfg {
  int block_count = 0;
  std::vector<CfgEdge> edges;
  std::vector<std::vector<int>> out;  // block -> edge indices
  std::vector<int> site_edge;         // branch id -> edge index

  int labeled_edge_count() const;
};

Cfg build_cfg(const Program& p);

/// Number of labeled edges strictly between the head of `from`'s edge and the
/// nearest target edge; 0 if `from` is itself a target, nullopt if no target
/// is reachable.
std::optional<int> branch_distance(const Cfg& cfg, BranchId from,
                                   const std::vector<BranchId>& targets);

/// All-targets variant: distance from the head of every branch edge to the
/// nearest target edge, indexed by branch id (nullopt = unreachable). The
/// self-distance rule applies as in branch_distance.
std::vector<std::optional<int>> distances_to(const Cfg& cfg,
                                             const std::vector<BranchId>& targets);

/// Distance from `from` to every branch edge (the per-target form of
/// branch_distance), indexed by branch id.
std::vector<std::optional<int>> distances_from(const Cfg& cfg, BranchId from);

/// Edge hops from every block to the nearest block in `targets`
/// (std::numeric_limits<int>::max() when none is reachable).
std::vector<int> block_hops_to(const Cfg& cfg, const std::vector<int>& targets);

}  // namespace dse::lang
