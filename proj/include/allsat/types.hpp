#pragma once

#include <cassert>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace allsat {

// Solution counts routinely exceed 2^64.
using BigCount = boost::multiprecision::cpp_int;

using Var = std::uint32_t;

// A literal packs a variable index and a polarity bit: code = 2*var + negative.
// Variable indices start at 1; code 0/1 is never a valid literal.
class Lit {
 public:
  constexpr Lit() = default;
  constexpr Lit(Var v, bool negative) : code_(2 * v + (negative ? 1u : 0u)) {}

  static constexpr Lit from_code(std::uint32_t code) {
    Lit l;
    l.code_ = code;
    return l;
  }
  static Lit from_dimacs(int x) {
    assert(x != 0);
    return Lit(static_cast<Var>(std::abs(x)), x < 0);
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool negative() const { return (code_ & 1u) != 0; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr bool valid() const { return code_ >= 2; }
  int to_dimacs() const {
    return negative() ? -static_cast<int>(var()) : static_cast<int>(var());
  }

  constexpr Lit operator~() const { return from_code(code_ ^ 1u); }
  constexpr auto operator<=>(const Lit&) const = default;

 private:
  std::uint32_t code_ = 0;
};

inline constexpr Lit kNoLit{};

// Three-valued assignment of a single variable.
enum class Value : std::int8_t { False = 0, True = 1, Unassigned = 2 };

inline Value value_of_lit(Value var_value, Lit l) {
  if (var_value == Value::Unassigned) return Value::Unassigned;
  bool t = (var_value == Value::True) != l.negative();
  return t ? Value::True : Value::False;
}

enum class ClauseOrigin : std::uint8_t { Problem, Learned, Blocking };

using ClauseRef = std::uint32_t;
inline constexpr ClauseRef kNoClause = std::numeric_limits<ClauseRef>::max();

// Receives each emitted cube (partial or total assignment) in internal variable
// indices. The span is only valid during the call.
using CubeSink = std::function<void(std::span<const Lit>)>;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Internal invariant breakage: indicates a bug, never bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::string to_string(const BigCount& c) { return c.str(); }

}  // namespace allsat
