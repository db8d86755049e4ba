#include "dse/lang/ast.hpp"

namespace dse::lang {

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
    case BinOp::Eq: case BinOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

const char* spelling(UnOp op) { return op == UnOp::Neg ? "-" : "!"; }

ExprPtr make_int(std::int32_t v, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::IntLit;
  e->value = v;
  e->loc = loc;
  return e;
}

ExprPtr make_var(std::string name, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}

ExprPtr make_index(std::string name, ExprPtr index, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Index;
  e->name = std::move(name);
  e->args.push_back(std::move(index));
  e->loc = loc;
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr x, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->unop = op;
  e->args.push_back(std::move(x));
  e->loc = loc;
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->binop = op;
  e->args.push_back(std::move(l));
  e->args.push_back(std::move(r));
  e->loc = loc;
  return e;
}

ExprPtr make_call(std::string name, std::vector<ExprPtr> args, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->name = std::move(name);
  e->args = std::move(args);
  e->loc = loc;
  return e;
}

namespace {

bool eq_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equivalent(*a, *b);
}

bool eq_stmts(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b);

bool eq_init(const Init& a, const Init& b) {
  return a.kind == b.kind && a.length == b.length && eq_ptr(a.expr, b.expr);
}

bool eq_stmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Decl:
      return a.name == b.name && a.array_len == b.array_len &&
             eq_init(a.init, b.init);
    case Stmt::Kind::Assign:
      return eq_ptr(a.target, b.target) && eq_ptr(a.value, b.value);
    case Stmt::Kind::CallStmt:
    case Stmt::Kind::Assert:
    case Stmt::Kind::Return:
      return eq_ptr(a.cond, b.cond);
    case Stmt::Kind::If:
      return eq_ptr(a.cond, b.cond) && eq_stmts(a.then_body, b.then_body) &&
             a.has_else == b.has_else && eq_stmts(a.else_body, b.else_body);
    case Stmt::Kind::While:
      return eq_ptr(a.cond, b.cond) && eq_stmts(a.then_body, b.then_body);
    case Stmt::Kind::Switch:
      if (!eq_ptr(a.cond, b.cond) || a.cases.size() != b.cases.size() ||
          a.has_default != b.has_default ||
          !eq_stmts(a.default_body, b.default_body)) {
        return false;
      }
      for (size_t i = 0; i < a.cases.size(); ++i) {
        if (a.cases[i].value != b.cases[i].value ||
            !eq_stmts(a.cases[i].body, b.cases[i].body)) {
          return false;
        }
      }
      return true;
    case Stmt::Kind::Error:
    case Stmt::Kind::Halt:
      return true;
    case Stmt::Kind::Block:
      return eq_stmts(a.then_body, b.then_body);
  }
  return false;
}

bool eq_stmts(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!eq_stmt(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

bool equivalent(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::Var:
    case Expr::Kind::Index:
    case Expr::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Unary:
      if (a.unop != b.unop) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binop != b.binop) return false;
      break;
  }
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!eq_ptr(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool equivalent(const Ast& a, const Ast& b) {
  if (a.globals.size() != b.globals.size() ||
      a.functions.size() != b.functions.size()) {
    return false;
  }
  for (size_t i = 0; i < a.globals.size(); ++i) {
    const auto& x = a.globals[i];
    const auto& y = b.globals[i];
    if (x.name != y.name || x.array_len != y.array_len ||
        !eq_init(x.init, y.init)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const auto& f = a.functions[i];
    const auto& g = b.functions[i];
    if (f.name != g.name || f.returns_value != g.returns_value ||
        f.params.size() != g.params.size()) {
      return false;
    }
    for (size_t p = 0; p < f.params.size(); ++p) {
      if (f.params[p].name != g.params[p].name) return false;
    }
    if (!eq_stmts(f.body, g.body)) return false;
  }
  return true;
}

}  // namespace dse::lang
