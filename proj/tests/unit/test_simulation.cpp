#include <gtest/gtest.h>

#include <cmath>

#include "bcn/examples.hpp"
#include "bcn/simulation.hpp"
#include "oracles.hpp"

using namespace bcn;

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, UniformIsCounterBased) {
  const double a = uniform01(42, 3, 17);
  EXPECT_EQ(a, uniform01(42, 3, 17));
  EXPECT_NE(a, uniform01(43, 3, 17));
  EXPECT_NE(a, uniform01(42, 4, 17));
  double sum = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double v = uniform01(1, i, 0);
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Sampling, CumulativeTableInversion) {
  const std::vector<Rational> p{Rational(3, 10), Rational(7, 10)};
  const auto c = cumulative_table(p);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.back(), 1.0);
  EXPECT_EQ(draw_index(c, 0.0), 0u);
  EXPECT_EQ(draw_index(c, 0.29), 0u);
  EXPECT_EQ(draw_index(c, 0.31), 1u);
  EXPECT_EQ(draw_index(c, 0.999999), 1u);
}

TEST(Deterministic, ExampleOneTrajectoryFollowsSchedule) {
  const auto rec = simulate_deterministic(examples::example1_network(), examples::example1_certificate(), 1, 6);
  std::vector<std::size_t> states, triggers;
  for (const auto& s : rec.steps) {
    states.push_back(s.state);
    if (s.trigger) triggers.push_back(s.t);
  }
  EXPECT_EQ(states, (std::vector<std::size_t>{1, 2, 3, 6, 8, 8, 8}));
  EXPECT_EQ(triggers, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(rec.steps[2].control, 2u);
}

TEST(Monte, ReproducibleAndOrderIndependent) {
  const auto net = examples::example2_network();
  const auto cert = examples::example2_certificate();
  SimulationOptions opt;
  opt.initial_state = 1;
  opt.horizon = 30;
  opt.seed = 42;
  opt.runs = 20;
  opt.keep_trajectories = true;
  const auto a = simulate(net, cert, opt);
  const auto b = simulate(net, cert, opt);
  EXPECT_EQ(trajectories_csv(a.trajectories), trajectories_csv(b.trajectories));
  opt.first_run = 10;
  opt.runs = 5;
  const auto c = simulate(net, cert, opt);
  for (std::size_t i = 0; i < 5; ++i) {
    ASSERT_EQ(c.trajectories[i].run, 10 + i);
    for (std::size_t t = 0; t <= 30; ++t) EXPECT_EQ(c.trajectories[i].steps[t].state, a.trajectories[10 + i].steps[t].state);
  }
  opt.runs = 0;
  EXPECT_THROW(simulate(net, cert, opt), std::invalid_argument);
}

TEST(Exact, DistributionsAreStochasticAndMatchMonteCarlo) {
  const auto net = examples::example2_network();
  const auto cert = examples::example2_certificate();
  for (std::size_t x : {5, 6, 1}) {
    const auto exact = exact_distribution(net, cert, x, 1, 40);
    for (const auto& dist : exact.state_distribution) {
      Rational total = 0;
      for (const auto& p : dist) total += p;
      EXPECT_EQ(total, Rational(1));
    }
    for (std::size_t k = 0; k + 1 < exact.sampling_v.size(); ++k)
      if (exact.active_mass[k] > 0) EXPECT_LT(exact.sampling_v[k + 1], exact.sampling_v[k]);
    SimulationOptions opt;
    opt.initial_state = x;
    opt.horizon = 40;
    opt.seed = 7;
    opt.runs = 2000;
    const auto sim = simulate(net, cert, opt);
    for (std::size_t t = 0; t <= 40; ++t) {
      const double p = to_double(exact.state_distribution[t][7]);
      const double se = std::sqrt(p * (1 - p) / 2000);
      EXPECT_NEAR(sim.stats.frac_at_equilibrium[t], p, 4 * se + 1e-9) << "x=" << x << " t=" << t;
    }
    const std::size_t common = std::min(exact.sampling_v.size(), sim.stats.sampling_mean.size());
    for (std::size_t k = 0; k < common; ++k)
      EXPECT_NEAR(sim.stats.sampling_mean[k], to_double(exact.sampling_v[k]), 4 * sim.stats.sampling_std_error[k] + 1e-9);
  }
}

TEST(Exact, DeterministicIsPointMass) {
  const auto exact = exact_distribution(examples::example1_network(), examples::example1_certificate(), 1, 1, 6);
  const std::vector<std::size_t> path{1, 2, 3, 6, 8, 8, 8};
  for (std::size_t t = 0; t <= 6; ++t) EXPECT_EQ(exact.state_distribution[t][path[t] - 1], Rational(1));
  EXPECT_EQ(exact.sampling_v, (std::vector<Rational>{5, 4, 0}));
}

TEST(Exact, CappedDecisionIsRejected) {
  auto net = gen::shell(NetworkClass::probabilistic, 2, 1);
  net.modes = {delta(4, {1, 2, 2, 4, 1, 4, 1, 3}), delta(4, {2, 2, 1, 4, 3, 1, 4, 4})};
  net.mode_names = {"a", "b"};
  net.probs = {Rational(9, 17), Rational(8, 17)};
  LyapunovCertificate cert;
  cert.kind = NetworkClass::probabilistic;
  cert.gains = {{Rational(425, 72), Rational(34, 9), Rational(33, 8), 0}};
  EXPECT_THROW(exact_distribution(net, cert, 1, 1, 50, 16), CapUnresolved);
  SimulationOptions opt;
  opt.initial_state = 1;
  opt.horizon = 50;
  opt.runs = 10;
  opt.mmax = 16;
  EXPECT_NO_THROW(simulate(net, cert, opt));
}

TEST(Output, CsvHeaders) {
  const auto rec = simulate_deterministic(examples::example1_network(), examples::example1_certificate(), 2, 3);
  const std::vector<TrajectoryRecord> recs{rec};
  EXPECT_EQ(trajectories_csv(recs).substr(0, 34), "t,run,state,mode,control,trigger,V");
  SimulationOptions opt;
  opt.horizon = 5;
  opt.runs = 3;
  const auto sim = simulate(examples::example2_network(), examples::example2_certificate(), opt);
  EXPECT_EQ(statistics_csv(sim.stats).substr(0, 30), "t,frac_at_equilibrium,mean_V\n0");
  EXPECT_EQ(sampling_csv(sim.stats).substr(0, 17), "k,mean_V,std_erro");
  EXPECT_NE(staircase_svg(recs, 8, 3).find("<svg"), std::string::npos);
}
