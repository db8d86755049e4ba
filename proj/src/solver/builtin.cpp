// Builtin solver: independence slicing, HC4-style interval propagation and
// domain-splitting search, with every Sat answer checked by evaluation.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "dse/solver/solver.hpp"

namespace dse::solver {

namespace {

using sym::Node;
using sym::Op;

constexpr std::int64_t kMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int32_t>::max();
constexpr std::int64_t kSpan = std::int64_t{1} << 32;

struct Iv {
  std::int64_t lo = kMin;
  std::int64_t hi = kMax;

  bool empty() const { return lo > hi; }
  bool singleton() const { return lo == hi; }
  bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
  std::int64_t size() const { return hi - lo + 1; }
  friend bool operator==(const Iv&, const Iv&) = default;
};

constexpr Iv kFull{kMin, kMax};
constexpr Iv kTrue{1, 1};
constexpr Iv kFalse{0, 0};
constexpr Iv kUnknownBool{0, 1};

Iv meet(Iv a, Iv b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }
Iv hull(Iv a, Iv b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Maps an exact int64 range back into int32 after two's-complement wrap.
Iv wrap(std::int64_t lo, std::int64_t hi) {
  if (lo >= kMin && hi <= kMax) return {lo, hi};
  if (hi - lo >= kSpan) return kFull;
  std::int64_t klo = floor_div(lo - kMin, kSpan);
  std::int64_t khi = floor_div(hi - kMin, kSpan);
  if (klo != khi) return kFull;
  return {lo - klo * kSpan, hi - klo * kSpan};
}

bool fits(std::int64_t lo, std::int64_t hi) { return lo >= kMin && hi <= kMax; }

// Exact results in [lo, hi] that wrap into r. Returns 0 pieces, 1 piece
// (stored in `piece`), or 2 for anything the caller cannot use.
int unwrap_into(std::int64_t lo, std::int64_t hi, Iv r, Iv& piece) {
  if (hi - lo >= kSpan) return 2;
  int found = 0;
  for (std::int64_t k = floor_div(lo - kMin, kSpan); k <= floor_div(hi - kMin, kSpan); ++k) {
    Iv p = meet({lo, hi}, {r.lo + k * kSpan, r.hi + k * kSpan});
    if (p.empty()) continue;
    if (++found > 1) return 2;
    piece = p;
  }
  return found;
}

Op flip(Op op) {
  switch (op) {
    case Op::Lt: return Op::Ge;
    case Op::Le: return Op::Gt;
    case Op::Gt: return Op::Le;
    case Op::Ge: return Op::Lt;
    case Op::Eq: return Op::Ne;
    case Op::Ne: return Op::Eq;
    default: return op;
  }
}

struct Timeout {};

class Search {
 public:
  Search(const std::vector<sym::Expr>& conjuncts, const std::vector<int>& vars,
         Iv domain, const sym::Model& hint, std::int64_t& nodes, std::int64_t node_limit,
         std::chrono::steady_clock::time_point deadline)
      : conjuncts_(conjuncts), vars_(vars), hint_(hint), nodes_(nodes),
        node_limit_(node_limit), deadline_(deadline) {
    for (size_t i = 0; i < vars.size(); ++i) index_[vars[i]] = static_cast<int>(i);
    root_.assign(vars.size(), domain);
    int top = vars.empty() ? 0 : *std::max_element(vars.begin(), vars.end());
    dense_.assign(static_cast<size_t>(top + 1), 0);
  }

  std::optional<std::vector<std::int64_t>> run() { return solve(root_); }

 private:
  using Box = std::vector<Iv>;

  void tick(std::int64_t amount = 1) {
    nodes_ += amount;
    if (nodes_ > node_limit_) throw Timeout{};
    if ((nodes_ & 255) == 0 && std::chrono::steady_clock::now() > deadline_) throw Timeout{};
  }

  // ---- forward interval evaluation ----

  Iv forward(const Node* n, const Box& box) {
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
    Iv r = compute(n, box);
    memo_.emplace(n, r);
    return r;
  }

  Iv compute(const Node* n, const Box& box) {
    switch (n->op) {
      case Op::Const: return {n->value, n->value};
      case Op::Sym: return box[static_cast<size_t>(index_.at(n->symbol))];
      case Op::Neg: {
        Iv a = forward(n->a.get(), box);
        return wrap(-a.hi, -a.lo);
      }
      case Op::Not: {
        Iv a = forward(n->a.get(), box);
        return {1 - a.hi, 1 - a.lo};
      }
      case Op::Add: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        return wrap(a.lo + b.lo, a.hi + b.hi);
      }
      case Op::Sub: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        return wrap(a.lo - b.hi, a.hi - b.lo);
      }
      case Op::Mul: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        std::int64_t c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return wrap(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
      }
      case Op::Div: return divide(forward(n->a.get(), box), forward(n->b.get(), box));
      case Op::Mod: return remainder(forward(n->a.get(), box), forward(n->b.get(), box));
      case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: case Op::Eq: case Op::Ne:
        return compare(n->op, forward(n->a.get(), box), forward(n->b.get(), box));
      case Op::And: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
      }
      case Op::Or: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
      }
      case Op::Ite: {
        Iv c = forward(n->a.get(), box);
        if (c == kTrue) return forward(n->b.get(), box);
        if (c == kFalse) return forward(n->c.get(), box);
        return hull(forward(n->b.get(), box), forward(n->c.get(), box));
      }
    }
    return kFull;
  }

  static Iv divide(Iv x, Iv y) {
    if (y.singleton() && y.lo > 0) return {x.lo / y.lo, x.hi / y.lo};
    if (y.singleton() && y.lo < -1) return {x.hi / y.lo, x.lo / y.lo};
    std::int64_t m = std::max(std::abs(x.lo), std::abs(x.hi));
    Iv r{std::max(-m, kMin), std::min(m, kMax)};
    if (y.contains(0)) r = hull(r, {-1, 1});
    return r;
  }

  static Iv remainder(Iv x, Iv y) {
    std::int64_t m = std::max(std::abs(y.lo), std::abs(y.hi)) - 1;
    if (m < 0) return x;  // y is exactly 0: result is x
    Iv r{x.lo >= 0 ? 0 : std::max(-m, x.lo), x.hi <= 0 ? 0 : std::min(m, x.hi)};
    if (y.contains(0)) r = hull(r, x);
    return r;
  }

  static Iv compare(Op op, Iv a, Iv b) {
    switch (op) {
      case Op::Lt:
        if (a.hi < b.lo) return kTrue;
        if (a.lo >= b.hi) return kFalse;
        return kUnknownBool;
      case Op::Le:
        if (a.hi <= b.lo) return kTrue;
        if (a.lo > b.hi) return kFalse;
        return kUnknownBool;
      case Op::Gt: return compare(Op::Lt, b, a);
      case Op::Ge: return compare(Op::Le, b, a);
      case Op::Eq:
        if (a.singleton() && b.singleton() && a.lo == b.lo) return kTrue;
        if (meet(a, b).empty()) return kFalse;
        return kUnknownBool;
      case Op::Ne: {
        Iv e = compare(Op::Eq, a, b);
        return {1 - e.hi, 1 - e.lo};
      }
      default:
        return kUnknownBool;
    }
  }

  // ---- backward projection; returns false on conflict ----

  bool narrow_var(int sym, Iv r, Box& box) {
    Iv& v = box[static_cast<size_t>(index_.at(sym))];
    Iv m = meet(v, r);
    if (m.empty()) return false;
    if (!(m == v)) {
      v = m;
      changed_ = true;
    }
    return true;
  }

  bool backward(const Node* n, Iv r, Box& box) {
    Iv f = forward(n, box);
    r = meet(r, f);
    if (r.empty()) return false;
    switch (n->op) {
      case Op::Const:
        return true;
      case Op::Sym:
        return narrow_var(n->symbol, r, box);
      case Op::Neg: {
        Iv a = forward(n->a.get(), box);
        if (a.lo == kMin) return true;
        return backward(n->a.get(), {-r.hi, -r.lo}, box);
      }
      case Op::Not:
        return backward(n->a.get(), {1 - r.hi, 1 - r.lo}, box);
      case Op::Add: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        if (!fits(a.lo + b.lo, a.hi + b.hi)) {
          int k = unwrap_into(a.lo + b.lo, a.hi + b.hi, r, r);
          if (k == 0) return false;
          if (k == 2) return true;
        }
        return backward(n->a.get(), {r.lo - b.hi, r.hi - b.lo}, box) &&
               backward(n->b.get(), {r.lo - a.hi, r.hi - a.lo}, box);
      }
      case Op::Sub: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        if (!fits(a.lo - b.hi, a.hi - b.lo)) {
          int k = unwrap_into(a.lo - b.hi, a.hi - b.lo, r, r);
          if (k == 0) return false;
          if (k == 2) return true;
        }
        return backward(n->a.get(), {r.lo + b.lo, r.hi + b.hi}, box) &&
               backward(n->b.get(), {a.lo - r.hi, a.hi - r.lo}, box);
      }
      case Op::Mul: {
        Iv a = forward(n->a.get(), box), b = forward(n->b.get(), box);
        std::int64_t c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        if (!fits(*std::min_element(c, c + 4), *std::max_element(c, c + 4))) return true;
        if (b.singleton() && b.lo != 0) return backward(n->a.get(), scale_inverse(r, b.lo), box);
        if (a.singleton() && a.lo != 0) return backward(n->b.get(), scale_inverse(r, a.lo), box);
        return true;
      }
      case Op::Div:
      case Op::Mod:
        return true;
      case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: case Op::Eq: case Op::Ne: {
        if (!r.singleton()) return true;
        Op op = r.lo == 1 ? n->op : flip(n->op);
        return relate(op, n->a.get(), n->b.get(), box);
      }
      case Op::And: {
        if (r == kTrue) return backward(n->a.get(), kTrue, box) && backward(n->b.get(), kTrue, box);
        if (r == kFalse) {
          if (forward(n->a.get(), box) == kTrue) return backward(n->b.get(), kFalse, box);
          if (forward(n->b.get(), box) == kTrue) return backward(n->a.get(), kFalse, box);
        }
        return true;
      }
      case Op::Or: {
        if (r == kFalse) return backward(n->a.get(), kFalse, box) && backward(n->b.get(), kFalse, box);
        if (r == kTrue) {
          if (forward(n->a.get(), box) == kFalse) return backward(n->b.get(), kTrue, box);
          if (forward(n->b.get(), box) == kFalse) return backward(n->a.get(), kTrue, box);
        }
        return true;
      }
      case Op::Ite: {
        Iv c = forward(n->a.get(), box);
        if (c == kTrue) return backward(n->b.get(), r, box);
        if (c == kFalse) return backward(n->c.get(), r, box);
        bool then_ok = !meet(r, forward(n->b.get(), box)).empty();
        bool else_ok = !meet(r, forward(n->c.get(), box)).empty();
        if (!then_ok && !else_ok) return false;
        if (!then_ok) return backward(n->a.get(), kFalse, box) && backward(n->c.get(), r, box);
        if (!else_ok) return backward(n->a.get(), kTrue, box) && backward(n->b.get(), r, box);
        return true;
      }
    }
    return true;
  }

  static Iv scale_inverse(Iv r, std::int64_t c) {
    if (c > 0) return {ceil_div(r.lo, c), floor_div(r.hi, c)};
    return {ceil_div(r.hi, c), floor_div(r.lo, c)};
  }

  bool relate(Op op, const Node* x, const Node* y, Box& box) {
    Iv a = forward(x, box), b = forward(y, box);
    switch (op) {
      case Op::Lt:
        return backward(x, {kMin, b.hi - 1}, box) && backward(y, {a.lo + 1, kMax}, box);
      case Op::Le:
        return backward(x, {kMin, b.hi}, box) && backward(y, {a.lo, kMax}, box);
      case Op::Gt:
        return relate(Op::Lt, y, x, box);
      case Op::Ge:
        return relate(Op::Le, y, x, box);
      case Op::Eq: {
        Iv m = meet(a, b);
        if (m.empty()) return false;
        return backward(x, m, box) && backward(y, m, box);
      }
      case Op::Ne:
        if (a.singleton() && b.singleton()) return a.lo != b.lo;
        if (b.singleton()) return backward(x, exclude(a, b.lo), box);
        if (a.singleton()) return backward(y, exclude(b, a.lo), box);
        return true;
      default:
        return true;
    }
  }

  static Iv exclude(Iv a, std::int64_t v) {
    if (a.lo == v) return {v + 1, a.hi};
    if (a.hi == v) return {a.lo, v - 1};
    return a;
  }

  bool propagate(Box& box) {
    for (int round = 0; round < 16; ++round) {
      changed_ = false;
      memo_.clear();
      for (const auto& c : conjuncts_) {
        if (!backward(c.get(), kTrue, box)) return false;
      }
      if (!changed_) break;
    }
    return true;
  }

  // ---- search ----

  bool satisfied(const std::vector<std::int64_t>& values) {
    for (size_t i = 0; i < vars_.size(); ++i) {
      dense_[static_cast<size_t>(vars_[i])] = static_cast<std::int32_t>(values[i]);
    }
    for (const auto& c : conjuncts_) {
      if (sym::evaluate(c, dense_) == 0) return false;
    }
    return true;
  }

  std::optional<std::vector<std::int64_t>> enumerate(const Box& box) {
    std::vector<std::int64_t> values(box.size());
    for (size_t i = 0; i < box.size(); ++i) values[i] = box[i].lo;
    for (;;) {
      tick();
      if (satisfied(values)) return values;
      bool advanced = false;
      for (size_t i = box.size(); i > 0 && !advanced; --i) {
        if (values[i - 1] < box[i - 1].hi) {
          ++values[i - 1];
          advanced = true;
        } else {
          values[i - 1] = box[i - 1].lo;
        }
      }
      if (!advanced) return std::nullopt;
    }
  }

  std::int64_t hint_for(int sym) const {
    auto it = hint_.find(sym);
    return it == hint_.end() ? 0 : it->second;
  }

  std::optional<std::vector<std::int64_t>> solve(Box box) {
    tick();
    if (!propagate(box)) return std::nullopt;

    // Try the box corner closest to the hint first: it is often a model.
    std::vector<std::int64_t> probe(box.size());
    double product = 1;
    int pick = -1;
    for (size_t i = 0; i < box.size(); ++i) {
      probe[i] = std::clamp(hint_for(vars_[i]), box[i].lo, box[i].hi);
      product *= static_cast<double>(box[i].size());
      if (!box[i].singleton() &&
          (pick < 0 || box[i].size() < box[static_cast<size_t>(pick)].size())) {
        pick = static_cast<int>(i);
      }
    }
    if (satisfied(probe)) return probe;
    // Then each variable moved to either end of its interval; overflow
    // conditions tend to live there and propagation cannot narrow them.
    for (size_t i = 0; i < box.size(); ++i) {
      if (box[i].singleton()) continue;
      for (std::int64_t end : {box[i].lo, box[i].hi}) {
        std::int64_t keep = probe[i];
        probe[i] = end;
        if (satisfied(probe)) return probe;
        probe[i] = keep;
      }
    }
    if (pick < 0) return std::nullopt;
    if (product <= 64) return enumerate(box);

    Iv v = box[static_cast<size_t>(pick)];
    std::int64_t h = hint_for(vars_[static_cast<size_t>(pick)]);
    std::vector<Iv> parts;
    if (v.contains(h)) {
      parts.push_back({h, h});
      if (h > v.lo) parts.push_back({v.lo, h - 1});
      if (h < v.hi) parts.push_back({h + 1, v.hi});
      // Nearer side first.
      if (parts.size() == 3 && (h - v.lo) > (v.hi - h)) std::swap(parts[1], parts[2]);
    } else {
      std::int64_t mid = v.lo + (v.hi - v.lo) / 2;
      Iv left{v.lo, mid}, right{mid + 1, v.hi};
      if (h > v.hi) std::swap(left, right);
      parts = {left, right};
    }
    for (const Iv& part : parts) {
      Box sub = box;
      sub[static_cast<size_t>(pick)] = part;
      if (auto r = solve(std::move(sub))) return r;
    }
    return std::nullopt;
  }

  const std::vector<sym::Expr>& conjuncts_;
  const std::vector<int>& vars_;
  const sym::Model& hint_;
  std::int64_t& nodes_;
  std::int64_t node_limit_;
  std::chrono::steady_clock::time_point deadline_;
  std::unordered_map<int, int> index_;
  std::unordered_map<const Node*, Iv> memo_;
  Box root_;
  std::vector<std::int32_t> dense_;
  bool changed_ = false;
};

// Union-find over symbols to split the query into independent components.
struct Components {
  std::vector<std::vector<sym::Expr>> conjuncts;
  std::vector<std::vector<int>> vars;
};

Components split(const std::vector<sym::Expr>& conjuncts) {
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    int p = parent.at(x);
    if (p == x) return x;
    int r = find(p);
    parent[x] = r;
    return r;
  };
  std::vector<std::set<int>> syms(conjuncts.size());
  for (size_t i = 0; i < conjuncts.size(); ++i) {
    sym::collect_symbols(conjuncts[i], syms[i]);
    for (int s : syms[i]) parent.emplace(s, s);
    if (syms[i].size() > 1) {
      int first = *syms[i].begin();
      for (int s : syms[i]) {
        int a = find(first), b = find(s);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<int, int> comp_of_root;
  Components out;
  for (const auto& [s, _] : parent) {
    int r = find(s);
    auto [it, fresh] = comp_of_root.emplace(r, static_cast<int>(out.vars.size()));
    if (fresh) {
      out.vars.emplace_back();
      out.conjuncts.emplace_back();
    }
    out.vars[static_cast<size_t>(it->second)].push_back(s);
  }
  for (size_t i = 0; i < conjuncts.size(); ++i) {
    if (syms[i].empty()) continue;
    int c = comp_of_root.at(find(*syms[i].begin()));
    out.conjuncts[static_cast<size_t>(c)].push_back(conjuncts[i]);
  }
  return out;
}

}  // namespace

std::int64_t domain_min(int bits) { return -(std::int64_t{1} << (bits - 1)); }
std::int64_t domain_max(int bits) { return (std::int64_t{1} << (bits - 1)) - 1; }

std::string to_string(const Verdict& v) {
  if (is_unsat(v)) return "unsat";
  if (auto* u = std::get_if<Unknown>(&v)) return "unknown(" + u->reason + ")";
  std::string out = "sat {";
  bool first = true;
  for (const auto& [s, val] : model_of(v)) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(s) + ":" + std::to_string(val);
  }
  return out + "}";
}

void Solver::record(const Verdict& v, std::int64_t work) {
  ++stats_.queries;
  stats_.work += work;
  if (is_sat(v)) ++stats_.sat;
  else if (is_unsat(v)) ++stats_.unsat;
  else ++stats_.unknown;
}

BuiltinSolver::BuiltinSolver(BuiltinOptions opts) : Solver(opts.domain_bits), opts_(opts) {}

Verdict BuiltinSolver::check(const std::vector<sym::Expr>& conjuncts, const sym::Model* hint) {
  static const sym::Model kEmpty;
  const sym::Model& h = hint ? *hint : kEmpty;
  std::int64_t nodes = 0;
  auto finish = [&](Verdict v) {
    last_work_ = nodes + 1;
    record(v, last_work_);
    return v;
  };

  for (const auto& c : conjuncts) {
    if (c->is_const() && c->value == 0) return finish(Unsat{});
  }
  Iv domain{domain_min(opts_.domain_bits), domain_max(opts_.domain_bits)};
  auto deadline = std::chrono::steady_clock::now() + opts_.timeout;
  Components comps = split(conjuncts);
  sym::Model model;
  try {
    for (size_t c = 0; c < comps.vars.size(); ++c) {
      Search search(comps.conjuncts[c], comps.vars[c], domain, h, nodes, opts_.node_limit,
                    deadline);
      auto values = search.run();
      if (!values) return finish(Unsat{});
      for (size_t i = 0; i < values->size(); ++i) {
        model[comps.vars[c][i]] = static_cast<std::int32_t>((*values)[i]);
      }
    }
  } catch (const Timeout&) {
    return finish(Unknown{"timeout"});
  }
  if (!sym::holds(conjuncts, model)) return finish(Unknown{"internal: model check failed"});
  return finish(Sat{std::move(model)});
}

}  // namespace dse::solver
