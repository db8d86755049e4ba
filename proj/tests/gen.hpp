#pragma once

#include <random>
#include <string>
#include <vector>

#include "dse/sym/expr.hpp"

namespace dse::test {

/// Random well-typed constraints over a few symbols, for oracle comparisons.
class ConstraintGen {
 public:
  ConstraintGen(std::uint64_t seed, int num_syms, int domain_bits)
      : rng_(seed), bits_(domain_bits) {
    for (int i = 0; i < num_syms; ++i) {
      syms_.push_back(sym::symbol(i, std::string(1, static_cast<char>('a' + i))));
    }
  }

  std::vector<sym::Expr> constraint(int max_conjuncts = 3) {
    std::vector<sym::Expr> out;
    int n = 1 + pick(max_conjuncts);
    for (int i = 0; i < n; ++i) out.push_back(boolean_expr(2));
    return out;
  }

  sym::Expr int_expr(int depth) {
    if (depth == 0 || pick(3) == 0) {
      if (pick(3) == 0) return sym::constant(small());
      return syms_[static_cast<size_t>(pick(static_cast<int>(syms_.size())))];
    }
    switch (pick(8)) {
      case 0: return sym::neg(int_expr(depth - 1));
      case 1: case 2: return sym::add(int_expr(depth - 1), int_expr(depth - 1));
      case 3: return sym::sub(int_expr(depth - 1), int_expr(depth - 1));
      case 4: return sym::mul(int_expr(depth - 1), int_expr(depth - 1));
      case 5: return pick(2) ? sym::div(int_expr(depth - 1), int_expr(depth - 1))
                             : sym::mod(int_expr(depth - 1), int_expr(depth - 1));
      case 6: return sym::ite(boolean_expr(depth - 1), int_expr(depth - 1), int_expr(depth - 1));
      default: return sym::add(int_expr(depth - 1), sym::constant(small()));
    }
  }

  sym::Expr boolean_expr(int depth) {
    int k = depth == 0 ? pick(6) : pick(9);
    auto x = int_expr(depth);
    auto y = pick(2) ? int_expr(depth) : sym::constant(small());
    switch (k) {
      case 0: return sym::lt(x, y);
      case 1: return sym::le(x, y);
      case 2: return sym::gt(x, y);
      case 3: return sym::ge(x, y);
      case 4: return sym::eq(x, y);
      case 5: return sym::ne(x, y);
      case 6: return sym::lnot(boolean_expr(depth - 1));
      case 7: return sym::land(boolean_expr(depth - 1), boolean_expr(depth - 1));
      default: return sym::lor(boolean_expr(depth - 1), boolean_expr(depth - 1));
    }
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  std::int32_t small() {
    std::int32_t lo = -(1 << (bits_ - 1));
    std::int32_t hi = (1 << (bits_ - 1)) - 1;
    return std::uniform_int_distribution<std::int32_t>(lo, hi)(rng_);
  }

  std::mt19937_64 rng_;
  int bits_;
  std::vector<sym::Expr> syms_;
};

}  // namespace dse::test
