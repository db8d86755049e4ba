#include "dse/lang/cfg.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace dse::lang {

int Cfg::labeled_edge_count() const {
  int n = 0;
  for (const auto& e : edges) n += e.site.has_value();
  return n;
}

Cfg build_cfg(const Program& p) {
  Cfg g;
  g.block_count = static_cast<int>(p.blocks.size());
  g.out.resize(p.blocks.size());
  g.site_edge.assign(static_cast<size_t>(p.branch_count()), -1);

  auto add = [&](int from, int to, std::optional<BranchId> site, CfgEdge::Kind kind) {
    int idx = static_cast<int>(g.edges.size());
    g.edges.push_back({from, to, site, kind});
    g.out[static_cast<size_t>(from)].push_back(idx);
    if (site) g.site_edge[static_cast<size_t>(*site)] = idx;
  };

  // Continuations per callee, for return edges.
  std::vector<std::vector<int>> continuations(p.functions.size());
  for (const auto& b : p.blocks) {
    if (b.term.kind == Terminator::Kind::Call) {
      continuations[static_cast<size_t>(b.term.callee)].push_back(b.term.target);
    }
  }

  for (const auto& b : p.blocks) {
    const Terminator& t = b.term;
    switch (t.kind) {
      case Terminator::Kind::Goto:
        add(b.id, t.target, std::nullopt, CfgEdge::Kind::Intra);
        break;
      case Terminator::Kind::Branch:
        add(b.id, t.target, true_arm(t.conditional), CfgEdge::Kind::Intra);
        add(b.id, t.alt, false_arm(t.conditional), CfgEdge::Kind::Intra);
        break;
      case Terminator::Kind::Call:
        add(b.id, p.functions[static_cast<size_t>(t.callee)].entry_block, std::nullopt,
            CfgEdge::Kind::Call);
        break;
      case Terminator::Kind::Return:
        for (int cont : continuations[static_cast<size_t>(b.function)]) {
          add(b.id, cont, std::nullopt, CfgEdge::Kind::Return);
        }
        break;
      case Terminator::Kind::Halt:
      case Terminator::Kind::Error:
        break;
    }
  }
  return g;
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

// 0-1 BFS over blocks: labeled edges cost 1, others 0 (every edge costs 1
// when unit_cost is set).
std::vector<int> block_distances(const Cfg& cfg, const std::vector<int>& sources,
                                 bool reverse, bool unit_cost = false) {
  std::vector<std::vector<int>> rev;
  if (reverse) {
    rev.resize(static_cast<size_t>(cfg.block_count));
    for (size_t i = 0; i < cfg.edges.size(); ++i) {
      rev[static_cast<size_t>(cfg.edges[i].to)].push_back(static_cast<int>(i));
    }
  }
  std::vector<int> dist(static_cast<size_t>(cfg.block_count), kInf);
  std::deque<int> queue;
  for (int s : sources) {
    if (dist[static_cast<size_t>(s)] != 0) {
      dist[static_cast<size_t>(s)] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    const auto& adj = reverse ? rev[static_cast<size_t>(u)] : cfg.out[static_cast<size_t>(u)];
    for (int ei : adj) {
      const CfgEdge& e = cfg.edges[static_cast<size_t>(ei)];
      int v = reverse ? e.from : e.to;
      int w = (unit_cost || e.site) ? 1 : 0;
      int nd = dist[static_cast<size_t>(u)] + w;
      if (nd < dist[static_cast<size_t>(v)]) {
        dist[static_cast<size_t>(v)] = nd;
        if (w == 0) queue.push_front(v);
        else queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

std::optional<int> branch_distance(const Cfg& cfg, BranchId from,
                                   const std::vector<BranchId>& targets) {
  for (BranchId t : targets) {
    if (t == from) return 0;
  }
  const CfgEdge& fe = cfg.edges[static_cast<size_t>(cfg.site_edge[static_cast<size_t>(from)])];
  std::vector<int> dist = block_distances(cfg, {fe.to}, false);
  int best = kInf;
  for (BranchId t : targets) {
    const CfgEdge& te = cfg.edges[static_cast<size_t>(cfg.site_edge[static_cast<size_t>(t)])];
    best = std::min(best, dist[static_cast<size_t>(te.from)]);
  }
  if (best == kInf) return std::nullopt;
  return best;
}

std::vector<std::optional<int>> distances_to(const Cfg& cfg,
                                             const std::vector<BranchId>& targets) {
  std::vector<int> sources;
  std::vector<bool> is_target(cfg.site_edge.size(), false);
  for (BranchId t : targets) {
    is_target[static_cast<size_t>(t)] = true;
    sources.push_back(cfg.edges[static_cast<size_t>(cfg.site_edge[static_cast<size_t>(t)])].from);
  }
  std::vector<int> dist = block_distances(cfg, sources, true);
  std::vector<std::optional<int>> out(cfg.site_edge.size());
  for (size_t b = 0; b < cfg.site_edge.size(); ++b) {
    if (is_target[b]) {
      out[b] = 0;
      continue;
    }
    int head = cfg.edges[static_cast<size_t>(cfg.site_edge[b])].to;
    int d = dist[static_cast<size_t>(head)];
    if (d != kInf) out[b] = d;
  }
  return out;
}

std::vector<int> block_hops_to(const Cfg& cfg, const std::vector<int>& targets) {
  return block_distances(cfg, targets, true, true);
}

std::vector<std::optional<int>> distances_from(const Cfg& cfg, BranchId from) {
  const CfgEdge& fe = cfg.edges[static_cast<size_t>(cfg.site_edge[static_cast<size_t>(from)])];
  std::vector<int> dist = block_distances(cfg, {fe.to}, false);
  std::vector<std::optional<int>> out(cfg.site_edge.size());
  for (size_t b = 0; b < cfg.site_edge.size(); ++b) {
    if (static_cast<BranchId>(b) == from) {
      out[b] = 0;
      continue;
    }
    int d = dist[static_cast<size_t>(cfg.edges[static_cast<size_t>(cfg.site_edge[b])].from)];
    if (d != kInf) out[b] = d;
  }
  return out;
}

}  // namespace dse::lang
