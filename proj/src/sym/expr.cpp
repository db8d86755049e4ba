#include "dse/sym/expr.hpp"

#include <functional>
#include <sstream>

#include "dse/sym/arith.hpp"

namespace dse::sym {

namespace {

Expr make(Op op, bool is_bool, Expr a = nullptr, Expr b = nullptr, Expr c = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->is_bool = is_bool;
  n->a = std::move(a);
  n->b = std::move(b);
  n->c = std::move(c);
  return n;
}

std::int32_t apply(Op op, std::int32_t x, std::int32_t y) {
  switch (op) {
    case Op::Add: return arith::add(x, y);
    case Op::Sub: return arith::sub(x, y);
    case Op::Mul: return arith::mul(x, y);
    case Op::Div: return arith::div(x, y);
    case Op::Mod: return arith::rem(x, y);
    case Op::Lt: return x < y;
    case Op::Le: return x <= y;
    case Op::Gt: return x > y;
    case Op::Ge: return x >= y;
    case Op::Eq: return x == y;
    case Op::Ne: return x != y;
    case Op::And: return (x != 0) && (y != 0);
    case Op::Or: return (x != 0) || (y != 0);
    default: return 0;
  }
}

}  // namespace

Expr constant(std::int32_t v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

Expr boolean(bool v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->is_bool = true;
  n->value = v ? 1 : 0;
  return n;
}

Expr symbol(int id, std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Sym;
  n->symbol = id;
  n->name = std::move(name);
  return n;
}

Expr to_int(Expr x) {
  if (!x->is_bool) return x;
  if (x->is_const()) return constant(x->value);
  return make(Op::Ite, false, std::move(x), constant(1), constant(0));
}

Expr to_bool(Expr x) {
  if (x->is_bool) return x;
  if (x->is_const()) return boolean(x->value != 0);
  return make(Op::Ne, true, std::move(x), constant(0));
}

Expr neg(Expr x) {
  x = to_int(std::move(x));
  if (x->is_const()) return constant(arith::neg(x->value));
  return make(Op::Neg, false, std::move(x));
}

Expr lnot(Expr x) {
  x = to_bool(std::move(x));
  if (x->is_const()) return boolean(x->value == 0);
  return make(Op::Not, true, std::move(x));
}

bool is_comparison(Op op) {
  switch (op) {
    case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: case Op::Eq: case Op::Ne:
      return true;
    default:
      return false;
  }
}

Expr binary(Op op, Expr x, Expr y) {
  bool logical = op == Op::And || op == Op::Or;
  if (logical) {
    x = to_bool(std::move(x));
    y = to_bool(std::move(y));
  } else {
    x = to_int(std::move(x));
    y = to_int(std::move(y));
  }
  bool result_bool = logical || is_comparison(op);
  if (x->is_const() && y->is_const()) {
    std::int32_t v = apply(op, x->value, y->value);
    return result_bool ? boolean(v != 0) : constant(v);
  }
  return make(op, result_bool, std::move(x), std::move(y));
}

Expr add(Expr x, Expr y) { return binary(Op::Add, std::move(x), std::move(y)); }
Expr sub(Expr x, Expr y) { return binary(Op::Sub, std::move(x), std::move(y)); }
Expr mul(Expr x, Expr y) { return binary(Op::Mul, std::move(x), std::move(y)); }
Expr div(Expr x, Expr y) { return binary(Op::Div, std::move(x), std::move(y)); }
Expr mod(Expr x, Expr y) { return binary(Op::Mod, std::move(x), std::move(y)); }
Expr lt(Expr x, Expr y) { return binary(Op::Lt, std::move(x), std::move(y)); }
Expr le(Expr x, Expr y) { return binary(Op::Le, std::move(x), std::move(y)); }
Expr gt(Expr x, Expr y) { return binary(Op::Gt, std::move(x), std::move(y)); }
Expr ge(Expr x, Expr y) { return binary(Op::Ge, std::move(x), std::move(y)); }
Expr eq(Expr x, Expr y) { return binary(Op::Eq, std::move(x), std::move(y)); }
Expr ne(Expr x, Expr y) { return binary(Op::Ne, std::move(x), std::move(y)); }
Expr land(Expr x, Expr y) { return binary(Op::And, std::move(x), std::move(y)); }
Expr lor(Expr x, Expr y) { return binary(Op::Or, std::move(x), std::move(y)); }

Expr ite(Expr cond, Expr then_v, Expr else_v) {
  cond = to_bool(std::move(cond));
  then_v = to_int(std::move(then_v));
  else_v = to_int(std::move(else_v));
  if (cond->is_const()) return cond->value ? then_v : else_v;
  return make(Op::Ite, false, std::move(cond), std::move(then_v), std::move(else_v));
}

bool structurally_equal(const Expr& x, const Expr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->op != y->op || x->is_bool != y->is_bool) return false;
  if (x->op == Op::Const) return x->value == y->value;
  if (x->op == Op::Sym) return x->symbol == y->symbol;
  return structurally_equal(x->a, y->a) && structurally_equal(x->b, y->b) &&
         structurally_equal(x->c, y->c);
}

namespace {

template <typename Lookup>
std::int32_t eval_impl(const Node& n, const Lookup& lookup) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Sym: return lookup(n.symbol);
    case Op::Neg: return arith::neg(eval_impl(*n.a, lookup));
    case Op::Not: return eval_impl(*n.a, lookup) == 0;
    case Op::Ite:
      return eval_impl(*n.a, lookup) != 0 ? eval_impl(*n.b, lookup) : eval_impl(*n.c, lookup);
    default:
      return apply(n.op, eval_impl(*n.a, lookup), eval_impl(*n.b, lookup));
  }
}

}  // namespace

std::int32_t evaluate(const Expr& e, const Model& m) {
  return eval_impl(*e, [&](int s) {
    auto it = m.find(s);
    return it == m.end() ? 0 : it->second;
  });
}

std::int32_t evaluate(const Expr& e, const std::vector<std::int32_t>& values) {
  return eval_impl(*e, [&](int s) {
    return static_cast<size_t>(s) < values.size() ? values[static_cast<size_t>(s)] : 0;
  });
}

bool holds(const std::vector<Expr>& conjuncts, const Model& m) {
  for (const auto& c : conjuncts) {
    if (evaluate(c, m) == 0) return false;
  }
  return true;
}

void collect_symbols(const Expr& e, std::set<int>& out) {
  if (!e) return;
  if (e->op == Op::Sym) {
    out.insert(e->symbol);
    return;
  }
  collect_symbols(e->a, out);
  collect_symbols(e->b, out);
  collect_symbols(e->c, out);
}

std::set<int> symbols_of(const std::vector<Expr>& conjuncts) {
  std::set<int> out;
  for (const auto& c : conjuncts) collect_symbols(c, out);
  return out;
}

std::map<int, std::string> symbol_names(const std::vector<Expr>& conjuncts) {
  std::map<int, std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (!e) return;
    if (e->op == Op::Sym) {
      out.emplace(e->symbol, e->name);
      return;
    }
    walk(e->a);
    walk(e->b);
    walk(e->c);
  };
  for (const auto& c : conjuncts) walk(c);
  return out;
}

int node_count(const Expr& e) {
  if (!e) return 0;
  return 1 + node_count(e->a) + node_count(e->b) + node_count(e->c);
}

namespace {

const char* infix(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    default: return "?";
  }
}

const char* smt_op(Op op) {
  switch (op) {
    case Op::Neg: return "bvneg";
    case Op::Not: return "not";
    case Op::Add: return "bvadd";
    case Op::Sub: return "bvsub";
    case Op::Mul: return "bvmul";
    case Op::Div: return "bvsdiv";
    case Op::Mod: return "bvsrem";
    case Op::Lt: return "bvslt";
    case Op::Le: return "bvsle";
    case Op::Gt: return "bvsgt";
    case Op::Ge: return "bvsge";
    case Op::Eq: return "=";
    case Op::Ne: return "distinct";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Ite: return "ite";
    default: return "?";
  }
}

void render(std::ostream& os, const Node& n) {
  switch (n.op) {
    case Op::Const:
      if (n.is_bool) os << (n.value ? "true" : "false");
      else os << n.value;
      return;
    case Op::Sym:
      os << n.name;
      return;
    case Op::Neg:
      os << "-";
      render(os, *n.a);
      return;
    case Op::Not:
      os << "!";
      render(os, *n.a);
      return;
    case Op::Ite:
      os << "(";
      render(os, *n.a);
      os << " ? ";
      render(os, *n.b);
      os << " : ";
      render(os, *n.c);
      os << ")";
      return;
    default:
      os << "(";
      render(os, *n.a);
      os << " " << infix(n.op) << " ";
      render(os, *n.b);
      os << ")";
      return;
  }
}

void render_smt(std::ostream& os, const Node& n) {
  switch (n.op) {
    case Op::Const:
      if (n.is_bool) os << (n.value ? "true" : "false");
      else os << "(_ bv" << static_cast<std::uint32_t>(n.value) << " 32)";
      return;
    case Op::Sym:
      os << smtlib_symbol(n.name);
      return;
    default:
      os << "(" << smt_op(n.op);
      for (const Node* k : {n.a.get(), n.b.get(), n.c.get()}) {
        if (!k) continue;
        os << " ";
        render_smt(os, *k);
      }
      os << ")";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  render(os, *e);
  return os.str();
}

std::string to_smtlib(const Expr& e) {
  std::ostringstream os;
  render_smt(os, *e);
  return os.str();
}

std::string smtlib_symbol(const std::string& name) {
  // Always quoted: MiniC identifiers may collide with SMT-LIB reserved words.
  return "|" + name + "|";
}

}  // namespace dse::sym
