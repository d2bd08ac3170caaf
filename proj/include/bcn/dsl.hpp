#pragma once

// Text front end for Boolean control networks.
//
//   # comment to end of line
//   nodes x1 x2 x3;
//   inputs u;                      (optional)
//   mode g1;                       (optional; starts a rule set)
//   rule x1 = x2 & !u;
//   prob 3/10, 7/10;               (probabilistic: one entry per mode)
//   markov 1/2, 1/2 | 1/3, 2/3;    (markovian: rows separated by '|')
//   target 0 0 1;                  (equilibrium bits X_1..X_n, optional)
//
// Operators by decreasing precedence: ! & | ^ -> <->. '->' is right
// associative, the others left associative. Numbers are "a/b", integers or
// decimals (converted exactly).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bcn/network.hpp"

namespace bcn::dsl {

struct BoolExpr {
  enum class Kind { variable, constant, negation, conjunction, disjunction, exclusive_or, implication, equivalence };

  Kind kind = Kind::constant;
  std::string name;  // variable
  bool value = false;  // constant
  std::vector<BoolExpr> operands;

  static BoolExpr variable(std::string name);
  static BoolExpr constant(bool value);
  static BoolExpr negation(BoolExpr operand);
  static BoolExpr binary(Kind kind, BoolExpr lhs, BoolExpr rhs);

  friend bool operator==(const BoolExpr&, const BoolExpr&) = default;
};

struct ModeRules {
  std::string name;
  std::vector<BoolExpr> rules;  // one per node, in node order

  friend bool operator==(const ModeRules&, const ModeRules&) = default;
};

struct NetworkSpec {
  std::vector<std::string> nodes;
  std::vector<std::string> inputs;
  NetworkClass kind = NetworkClass::deterministic;
  std::vector<ModeRules> modes;
  RationalVector probs;
  std::vector<RationalVector> pi_rows;
  std::optional<BitVector> target;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

NetworkSpec parse(std::string_view text);

/// Canonical text form; parse(print(s)) == s.
std::string print(const NetworkSpec& spec);
std::string print(const BoolExpr& expr);

/// Evaluates `expr` with variables bound by position in `names`.
bool evaluate(const BoolExpr& expr, const std::vector<std::string>& names,
              const std::vector<std::uint8_t>& values);

struct CompileOptions {
  std::size_t max_bits = 20;  // cap on n + m
};

/// Truth-table compilation. Applies `spec.target` relabeling, if any.
CompiledNetwork compile(const NetworkSpec& spec, const CompileOptions& options = {});

/// Independent route: per-node structure matrices combined with swap and
/// power-reducing matrices. Practical only for small n + m.
CompiledNetwork compile_via_stp(const NetworkSpec& spec, const CompileOptions& options = {});

/// Conjugates every mode by the transposition moving `target` (user
/// coordinates) to delta_{2^n}^{2^n}. Any earlier relabeling is undone first.
CompiledNetwork relabel_equilibrium(const CompiledNetwork& net, const BitVector& target);

/// Restores user coordinates (identity permutation).
CompiledNetwork unrelabel(const CompiledNetwork& net);

}  // namespace bcn::dsl
