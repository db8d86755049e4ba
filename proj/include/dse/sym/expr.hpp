#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace dse::sym {

enum class Op : std::uint8_t {
  Const, Sym,
  Neg, Not,
  Add, Sub, Mul, Div, Mod,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Or,
  Ite,
};

struct Node;
using Expr = std::shared_ptr<const Node>;

/// Immutable expression node. Boolean-typed nodes (comparisons, And, Or,
/// Not, boolean constants) carry is_bool; everything else is a 32-bit int.
struct Node {
  Op op = Op::Const;
  bool is_bool = false;
  std::int32_t value = 0;  // Const (0/1 when is_bool)
  int symbol = -1;         // Sym: flat input symbol id
  std::string name;        // Sym: display name, e.g. "x" or "a[3]"
  Expr a, b, c;

  bool is_const() const { return op == Op::Const; }
};

/// Assignment of input symbols, keyed by symbol id.
using Model = std::map<int, std::int32_t>;

// Smart constructors. They fold subtrees whose operands are all constant and
// otherwise build the node as written.
Expr constant(std::int32_t v);
Expr boolean(bool v);
Expr symbol(int id, std::string name);
Expr neg(Expr x);
Expr lnot(Expr x);
Expr add(Expr x, Expr y);
Expr sub(Expr x, Expr y);
Expr mul(Expr x, Expr y);
Expr div(Expr x, Expr y);
Expr mod(Expr x, Expr y);
Expr lt(Expr x, Expr y);
Expr le(Expr x, Expr y);
Expr gt(Expr x, Expr y);
Expr ge(Expr x, Expr y);
Expr eq(Expr x, Expr y);
Expr ne(Expr x, Expr y);
Expr land(Expr x, Expr y);
Expr lor(Expr x, Expr y);
Expr ite(Expr cond, Expr then_v, Expr else_v);

/// Integer view of a boolean (1/0) and boolean view of an integer (!= 0).
Expr to_int(Expr x);
Expr to_bool(Expr x);

Expr binary(Op op, Expr x, Expr y);

bool is_comparison(Op op);
bool structurally_equal(const Expr& x, const Expr& y);

/// Concrete evaluation; symbols missing from the model read as 0. Booleans
/// evaluate to 0/1.
std::int32_t evaluate(const Expr& e, const Model& m);
std::int32_t evaluate(const Expr& e, const std::vector<std::int32_t>& values);
bool holds(const std::vector<Expr>& conjuncts, const Model& m);

void collect_symbols(const Expr& e, std::set<int>& out);
std::set<int> symbols_of(const std::vector<Expr>& conjuncts);
std::map<int, std::string> symbol_names(const std::vector<Expr>& conjuncts);
int node_count(const Expr& e);

/// Infix rendering for diagnostics and tests, e.g. "((x + 1) < 3)".
std::string to_string(const Expr& e);

/// SMT-LIB2 term over 32-bit bit-vectors.
std::string to_smtlib(const Expr& e);
/// SMT-LIB2 symbol for an input.
std::string smtlib_symbol(const std::string& name);

}  // namespace dse::sym
