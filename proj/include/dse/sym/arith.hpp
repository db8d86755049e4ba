#pragma once

#include <cstdint>
#include <limits>

// 32-bit two's-complement arithmetic shared by the interpreter, the symbolic
// evaluator and the solver. Division follows SMT-LIB bvsdiv/bvsrem so that
// the builtin and external solvers agree even on a zero divisor.
namespace dse::sym::arith {

inline std::int32_t wrap(std::int64_t v) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
}

inline std::int32_t add(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) + static_cast<std::uint32_t>(b));
}

inline std::int32_t sub(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) - static_cast<std::uint32_t>(b));
}

inline std::int32_t mul(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) * static_cast<std::uint32_t>(b));
}

inline std::int32_t neg(std::int32_t a) { return sub(0, a); }

inline std::int32_t div(std::int32_t a, std::int32_t b) {
  if (b == 0) return a < 0 ? 1 : -1;
  if (a == std::numeric_limits<std::int32_t>::min() && b == -1) return a;
  return a / b;
}

inline std::int32_t rem(std::int32_t a, std::int32_t b) {
  if (b == 0) return a;
  if (b == -1) return 0;
  return a % b;
}

}  // namespace dse::sym::arith
