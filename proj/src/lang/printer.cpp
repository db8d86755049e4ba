#include <sstream>

#include "dse/lang/program.hpp"

namespace dse::lang {

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq: case BinOp::Ne: return 3;
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
    case BinOp::Add: case BinOp::Sub: return 5;
    case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 6;
  }
  return 0;
}

constexpr int kUnaryPrec = 7;

void print_expr(std::ostream& os, const Expr& e, int min_prec) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      // Negative literals print parenthesized so "a - -1" and "-(x)" stay
      // unambiguous on reparse.
      if (e.value < 0 && min_prec > 0) os << "(" << static_cast<std::int64_t>(e.value) << ")";
      else os << e.value;
      return;
    case Expr::Kind::Var:
      os << e.name;
      return;
    case Expr::Kind::Index:
      os << e.name << "[";
      print_expr(os, *e.args[0], 0);
      os << "]";
      return;
    case Expr::Kind::Call:
      os << e.name << "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, *e.args[i], 0);
      }
      os << ")";
      return;
    case Expr::Kind::Unary:
      os << spelling(e.unop);
      if (e.args[0]->kind == Expr::Kind::IntLit && e.args[0]->value >= 0) {
        // "-5" would reparse as a literal.
        os << "(" << e.args[0]->value << ")";
        return;
      }
      print_expr(os, *e.args[0], kUnaryPrec);
      return;
    case Expr::Kind::Binary: {
      int p = precedence(e.binop);
      bool parens = p < min_prec;
      if (parens) os << "(";
      print_expr(os, *e.args[0], p);
      os << " " << spelling(e.binop) << " ";
      // Left-associative: the right operand needs strictly higher precedence.
      print_expr(os, *e.args[1], p + 1);
      if (parens) os << ")";
      return;
    }
  }
}

class Printer {
 public:
  explicit Printer(std::ostream& os) : os_(os) {}

  void init(const Init& in) {
    switch (in.kind) {
      case Init::Kind::None: break;
      case Init::Kind::Expr:
        os_ << " = ";
        print_expr(os_, *in.expr, 0);
        break;
      case Init::Kind::Input: os_ << " = input()"; break;
      case Init::Kind::InputArray: os_ << " = input_array(" << in.length << ")"; break;
    }
  }

  void body(const std::vector<StmtPtr>& stmts, int depth) {
    os_ << "{\n";
    for (const auto& s : stmts) stmt(*s, depth + 1);
    indent(depth);
    os_ << "}";
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    switch (s.kind) {
      case Stmt::Kind::Decl:
        os_ << "int " << s.name;
        if (s.array_len) os_ << "[" << s.array_len << "]";
        init(s.init);
        os_ << ";\n";
        return;
      case Stmt::Kind::Assign:
        print_expr(os_, *s.target, 0);
        os_ << " = ";
        print_expr(os_, *s.value, 0);
        os_ << ";\n";
        return;
      case Stmt::Kind::CallStmt:
        print_expr(os_, *s.cond, 0);
        os_ << ";\n";
        return;
      case Stmt::Kind::If:
        os_ << "if (";
        print_expr(os_, *s.cond, 0);
        os_ << ") ";
        body(s.then_body, depth);
        if (s.has_else) {
          os_ << " else ";
          body(s.else_body, depth);
        }
        os_ << "\n";
        return;
      case Stmt::Kind::While:
        os_ << "while (";
        print_expr(os_, *s.cond, 0);
        os_ << ") ";
        body(s.then_body, depth);
        os_ << "\n";
        return;
      case Stmt::Kind::Switch:
        os_ << "switch (";
        print_expr(os_, *s.cond, 0);
        os_ << ") {\n";
        for (const auto& c : s.cases) {
          indent(depth + 1);
          os_ << "case " << c.value << ":\n";
          for (const auto& b : c.body) stmt(*b, depth + 2);
        }
        if (s.has_default) {
          indent(depth + 1);
          os_ << "default:\n";
          for (const auto& b : s.default_body) stmt(*b, depth + 2);
        }
        indent(depth);
        os_ << "}\n";
        return;
      case Stmt::Kind::Return:
        os_ << "return";
        if (s.cond) {
          os_ << " ";
          print_expr(os_, *s.cond, 0);
        }
        os_ << ";\n";
        return;
      case Stmt::Kind::Assert:
        os_ << "assert(";
        print_expr(os_, *s.cond, 0);
        os_ << ");\n";
        return;
      case Stmt::Kind::Error:
        os_ << "error();\n";
        return;
      case Stmt::Kind::Halt:
        os_ << "halt;\n";
        return;
      case Stmt::Kind::Block:
        body(s.then_body, depth);
        os_ << "\n";
        return;
    }
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) os_ << "  ";
  }

  std::ostream& os_;
};

}  // namespace

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const Ast& ast) {
  std::ostringstream os;
  Printer pr(os);
  for (const auto& g : ast.globals) {
    os << "int " << g.name;
    if (g.array_len) os << "[" << g.array_len << "]";
    pr.init(g.init);
    os << ";\n";
  }
  for (const auto& f : ast.functions) {
    os << (f.returns_value ? "int " : "void ") << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << "int " << f.params[i].name;
    }
    os << ") ";
    pr.body(f.body, 0);
    os << "\n";
  }
  return os.str();
}

}  // namespace dse::lang
