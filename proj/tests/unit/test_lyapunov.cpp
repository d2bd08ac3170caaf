#include <gtest/gtest.h>

#include <random>

#include "bcn/examples.hpp"
#include "bcn/lyapunov.hpp"
#include "oracles.hpp"

using namespace bcn;

TEST(ClosedLoop, ExampleOneComposition) {
  const auto loop = closed_loop_deterministic(examples::example1_network().modes[0], examples::example1_gain());
  EXPECT_EQ(loop, delta(8, {2, 3, 6, 6, 8, 7, 5, 8}));
  EXPECT_TRUE(check_fixed_point(loop));
  EXPECT_EQ(oracle::to_dense(loop), oracle::closed_loop_dense(examples::example1_network().modes[0], examples::example1_gain()));
}

TEST(ClosedLoop, ExpectedIsColumnStochastic) {
  const auto net = examples::example2_network();
  const auto g = expected_closed_loop(net.modes, net.probs, examples::example2_gain());
  EXPECT_TRUE(g.is_column_stochastic());
  EXPECT_EQ(oracle::to_dense(g), oracle::expected_loop(net.modes, net.probs, examples::example2_gain()));
}

TEST(Partition, RoundTrips) {
  RationalMatrix m(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto p = partition(m);
  EXPECT_EQ(p.m22, Rational(9));
  EXPECT_EQ(p.m12, (RationalVector{3, 6}));
  EXPECT_EQ(p.m21, (RationalVector{7, 8}));
  EXPECT_EQ(reassemble(p), m);
}

TEST(Synthesis, ExampleOneNeumannSum) {
  const auto r = synth_deterministic(delta(8, {2, 3, 6, 6, 8, 7, 5, 8}));
  ASSERT_TRUE(std::holds_alternative<LyapunovCertificate>(r));
  EXPECT_EQ(std::get<LyapunovCertificate>(r).gain(), (RationalVector{6, 5, 4, 4, 1, 3, 2, 0}));
  EXPECT_EQ(std::get<LyapunovCertificate>(r).min_slack, Rational(1));
}

TEST(Synthesis, CycleIsReported) {
  const auto r = synth_deterministic(delta(4, {2, 1, 4, 4}));
  ASSERT_TRUE(std::holds_alternative<NotStabilized>(r));
  auto w = std::get<NotStabilized>(r).witness;
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(std::holds_alternative<NotStabilized>(synth_deterministic(delta(4, {1, 2, 3, 3}))));
}

TEST(Synthesis, ProbabilisticGivesUnitSlack) {
  const auto net = examples::example2_network();
  const auto g = expected_closed_loop(net.modes, net.probs, examples::example2_gain());
  const auto r = synth_probabilistic(g);
  ASSERT_TRUE(std::holds_alternative<LyapunovCertificate>(r));
  const auto& nu = std::get<LyapunovCertificate>(r).gain();
  for (const auto& s : oracle::slacks(oracle::to_dense(g), nu)) EXPECT_EQ(s, Rational(1));
  EXPECT_EQ(nu[0], Rational(3037, 343));
  EXPECT_EQ(nu[2], Rational(34731, 3430));
}

TEST(Synthesis, MarkovianSatisfiesStackedInequality) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto sys = gen::draw_until([&] { return gen::stochastic(NetworkClass::markovian, 2, 1, 2, rng); });
    const auto loops = closed_loop_markovian(sys.net.modes, sys.k);
    const std::size_t d = 4;
    for (std::size_t i2 = 0; i2 < 2; ++i2)
      for (std::size_t a = 1; a < d; ++a) {
        Rational next = 0;
        for (std::size_t j = 0; j < 2; ++j) next += sys.net.pi.at(i2, j) * sys.cert.gain(j)[loops[i2].column(a) - 1];
        EXPECT_LT(next, sys.cert.gain(i2)[a - 1]);
      }
  }
}

TEST(Verification, GivenCertificates) {
  const auto r1 = verify_certificate(examples::example1_certificate(),
                                     close_loop(examples::example1_network(), examples::example1_gain()));
  EXPECT_TRUE(r1.valid);
  EXPECT_EQ(r1.min_slack, Rational(1, 2));
  const auto r2 = verify_certificate(examples::example2_certificate(),
                                     close_loop(examples::example2_network(), examples::example2_gain()));
  EXPECT_TRUE(r2.valid);
  EXPECT_EQ(r2.min_slack, Rational(1, 100));
  EXPECT_EQ(r2.slacks[4], Rational(1, 100));
}

TEST(Verification, RejectsBadCertificates) {
  const auto loop = close_loop(examples::example1_network(), examples::example1_gain());
  auto cert = examples::example1_certificate();
  cert.gains[0][7] = 1;
  EXPECT_FALSE(verify_certificate(cert, loop).valid);
  cert = examples::example1_certificate();
  cert.gains[0][0] = Rational(3, 2);  // next state 2 has 9/2
  const auto report = verify_certificate(cert, loop);
  EXPECT_FALSE(report.valid);
  EXPECT_LT(report.min_slack, 0);
  cert = examples::example1_certificate();
  cert.gains[0][2] = 0;
  EXPECT_FALSE(verify_certificate(cert, loop).valid);
}

TEST(SolveExact, SmallSystems) {
  const auto x = solve_exact(RationalMatrix(2, 2, {2, 1, 1, 3}), {3, 5});
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (RationalVector{Rational(4, 5), Rational(7, 5)}));
  EXPECT_FALSE(solve_exact(RationalMatrix(2, 2, {1, 2, 2, 4}), {1, 1}));
}
