#include <gtest/gtest.h>

#include <random>

#include "bcn/dsl.hpp"
#include "oracles.hpp"

using namespace bcn;

TEST(Dsl, ParsesDeterministicNetwork) {
  const auto spec = dsl::parse("nodes a b;\ninputs u;\nrule a = b & !u;\nrule b = a | u;\n");
  EXPECT_EQ(spec.kind, NetworkClass::deterministic);
  ASSERT_EQ(spec.modes.size(), 1u);
  EXPECT_EQ(spec.nodes, (std::vector<std::string>{"a", "b"}));
  const auto net = dsl::compile(spec);
  const auto expected = oracle::truth_table_columns(spec, 0);
  EXPECT_EQ(std::vector<std::size_t>(net.modes[0].col_index().begin(), net.modes[0].col_index().end()), expected);
}

TEST(Dsl, OperatorPrecedenceAndAssociativity) {
  const std::vector<std::string> names{"a", "b", "c"};
  const auto spec = dsl::parse("nodes a b c;\nrule a = a | b & c;\nrule b = a -> b -> c;\nrule c = a ^ b <-> c;\n");
  for (std::size_t x = 1; x <= 8; ++x) {
    const auto v = oracle::bits_of(x, 3);
    const bool a = v[0], b = v[1], c = v[2];
    EXPECT_EQ(dsl::evaluate(spec.modes[0].rules[0], names, v), a || (b && c));
    EXPECT_EQ(dsl::evaluate(spec.modes[0].rules[1], names, v), !a || (!b || c));
    EXPECT_EQ(dsl::evaluate(spec.modes[0].rules[2], names, v), (a != b) == c);
  }
}

TEST(Dsl, ProbabilisticAndMarkovHeaders) {
  const auto p = dsl::parse("nodes x;\ninputs u;\nmode a;\nrule x = u;\nmode b;\nrule x = !u;\nprob 0.3, 7/10;\n");
  EXPECT_EQ(p.kind, NetworkClass::probabilistic);
  EXPECT_EQ(p.probs, (RationalVector{Rational(3, 10), Rational(7, 10)}));
  const auto m = dsl::parse("nodes x;\nmode a;\nrule x = x;\nmode b;\nrule x = !x;\nmarkov 1/2, 1/2 | 1, 0;\n");
  EXPECT_EQ(m.kind, NetworkClass::markovian);
  ASSERT_EQ(m.pi_rows.size(), 2u);
  EXPECT_EQ(m.pi_rows[1], (RationalVector{1, 0}));
  const auto net = dsl::compile(m);
  EXPECT_EQ(net.mode_count(), 2u);
  EXPECT_EQ(net.pi.at(0, 1), Rational(1, 2));
}

TEST(Dsl, ErrorsCarryLineAndColumn) {
  try {
    dsl::parse("nodes a;\nrule a = a & ;\n");
    FAIL() << "expected ParseError";
  } catch (const dsl::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_THROW(dsl::parse("nodes a;\nrule b = a;\n"), dsl::ParseError);
  EXPECT_THROW(dsl::parse("nodes a;\nrule a = a $ a;\n"), dsl::ParseError);
  EXPECT_THROW(dsl::parse("nodes x;\nmode a;\nrule x = x;\nmode b;\nrule x = !x;\nprob 1/2, 1/3;\n"), dsl::ParseError);
}

TEST(Dsl, BitCapIsEnforced) {
  std::mt19937_64 rng(1);
  const auto spec = gen::random_spec(3, 2, rng);
  dsl::CompileOptions tight;
  tight.max_bits = 4;
  EXPECT_THROW(dsl::compile(spec, tight), CapacityError);
}

TEST(Dsl, CompileMatchesOracleAndStpRoute) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 1 + rng() % 4, m = rng() % 3;
    const auto spec = gen::random_spec(n, m, rng);
    const auto net = dsl::compile(spec);
    const auto cols = net.modes[0].col_index();
    EXPECT_EQ(std::vector<std::size_t>(cols.begin(), cols.end()), oracle::truth_table_columns(spec, 0));
    EXPECT_EQ(dsl::compile_via_stp(spec).modes[0], net.modes[0]);
    EXPECT_EQ(dsl::parse(dsl::print(spec)), spec);
  }
}

TEST(Dsl, TargetRelabelingMovesEquilibriumLast) {
  auto spec = dsl::parse("nodes a b;\ninputs u;\nrule a = b & u;\nrule b = a & u;\ntarget 1 1;\n");
  const auto net = dsl::compile(spec);
  EXPECT_EQ(net.to_internal(1), 4u);
  EXPECT_EQ(net.to_user(4), 1u);
  spec.target.reset();
  const auto plain = dsl::compile(spec);
  // conjugation: internal F = P F_user (I kron P)
  for (std::size_t u = 1; u <= 2; ++u)
    for (std::size_t x = 1; x <= 4; ++x)
      EXPECT_EQ(net.to_user(successor(net.modes[0], u, net.to_internal(x))), successor(plain.modes[0], u, x));
  EXPECT_EQ(dsl::unrelabel(net).modes[0], plain.modes[0]);
}
