#pragma once

// Closed-loop self-triggered simulation: seeded Monte Carlo and exact
// distribution evolution.
//
// Random numbers come from Philox4x32-10 keyed by the 64-bit seed
// (key = {low word, high word}) with counter {step low, step high, run low,
// run high}. One counter value feeds one uniform draw in [0, 1) built from 53
// bits: (out[0] << 21) | (out[1] >> 11), times 2^-53. Mode draws invert the
// cumulative distribution; each exact cumulative probability is converted to
// binary64 by truncation toward zero and the last entry is forced to 1.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bcn/lyapunov.hpp"
#include "bcn/network.hpp"
#include "bcn/rational.hpp"
#include "bcn/self_trigger.hpp"

namespace bcn {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

double uniform01(std::uint64_t seed, std::uint64_t run, std::uint64_t step);

std::vector<double> cumulative_table(std::span<const Rational> probs);

/// 0-based index i with cumulative[i-1] <= u < cumulative[i].
std::size_t draw_index(std::span<const double> cumulative, double u);

/// A reached trigger decision hit the M_max cap, so the augmented chain is
/// not determined exactly.
class CapUnresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed loop of a network under self-triggered control, in internal
/// coordinates. Modes are 1-based; non-markovian networks use mode 1 only.
/// Decisions are memoized per (state, mode).
class ClosedLoopModel {
 public:
  ClosedLoopModel(CompiledNetwork net, LyapunovCertificate cert, std::size_t mmax);

  const CompiledNetwork& network() const { return net_; }
  std::size_t state_count() const { return net_.state_count(); }
  std::size_t tracked_modes() const;

  const TriggerDecision& decision(std::size_t state, std::size_t mode);
  const Rational& value(std::size_t state, std::size_t mode) const;

  /// One step under control u: (next state, next mode, probability).
  struct Transition {
    std::size_t state;
    std::size_t mode;
    Rational probability;
  };
  std::vector<Transition> transitions(std::size_t state, std::size_t mode, std::size_t u) const;

  /// Sampled step from a uniform draw. For probabilistic networks
  /// `mode_used` receives the drawn mode.
  std::pair<std::size_t, std::size_t> sample(std::size_t state, std::size_t mode, std::size_t u,
                                             double draw, std::size_t& mode_used) const;

 private:
  CompiledNetwork net_;
  LyapunovCertificate cert_;
  std::size_t mmax_;
  std::vector<std::optional<TriggerDecision>> decisions_;
  std::vector<std::vector<double>> cumulative_;
};

struct TrajectoryStep {
  std::size_t t = 0;
  std::size_t state = 0;            // user coordinates
  std::optional<std::size_t> mode;  // markovian: sigma(t); probabilistic: mode drawn at t
  std::size_t control = 0;
  bool trigger = false;
  Rational v;
};

struct TrajectoryRecord {
  std::size_t run = 0;
  std::vector<TrajectoryStep> steps;
};

struct RunStatistics {
  std::size_t runs = 0;
  std::size_t horizon = 0;
  std::vector<double> frac_at_equilibrium;  // per t
  std::vector<double> mean_v;               // per t
  /// Per sampling instant k: mean and standard error over runs of
  /// V(y(min(t_k, T))), with t_k infinite when a run triggers fewer times.
  std::vector<double> sampling_mean;
  std::vector<double> sampling_std_error;
};

struct SimulationOptions {
  std::size_t initial_state = 1;  // user coordinates
  std::size_t initial_mode = 1;   // markovian only
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::uint64_t first_run = 0;  // RNG run index of the first run
  bool keep_trajectories = false;
  std::size_t mmax = 0;  // 0: default_mmax(n)
};

struct SimulationResult {
  RunStatistics stats;
  std::vector<TrajectoryRecord> trajectories;
};

TrajectoryRecord simulate_deterministic(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                        std::size_t initial_state, std::size_t horizon);
SimulationResult simulate_probabilistic(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                        const SimulationOptions& options);
SimulationResult simulate_markovian(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                    const SimulationOptions& options);
SimulationResult simulate(const CompiledNetwork& net, const LyapunovCertificate& cert,
                          const SimulationOptions& options);

/// State of the augmented chain, internal coordinates. `countdown` is the
/// number of steps left before the next trigger (nullopt: none).
struct AugmentedState {
  std::size_t state = 0;
  std::size_t mode = 1;
  std::size_t control = 0;
  std::optional<std::size_t> countdown;

  friend auto operator<=>(const AugmentedState&, const AugmentedState&) = default;
};

struct ExactDistribution {
  std::size_t horizon = 0;
  std::vector<std::vector<std::pair<AugmentedState, Rational>>> augmented;  // per t
  std::vector<RationalVector> state_distribution;  // per t, user coordinates
  std::vector<Rational> expected_v;                // per t
  /// E V(y(min(t_k, T))) per sampling instant k, until no run triggers again.
  std::vector<Rational> sampling_v;
  /// Probability that t_k < T and V(y(t_k)) > 0.
  std::vector<Rational> active_mass;
};

ExactDistribution exact_distribution(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                     std::size_t initial_state, std::size_t initial_mode,
                                     std::size_t horizon, std::size_t mmax = 0);

std::string trajectories_csv(std::span<const TrajectoryRecord> records);
std::string statistics_csv(const RunStatistics& stats);
std::string sampling_csv(const RunStatistics& stats);
/// Staircase plot of state index against t.
std::string staircase_svg(std::span<const TrajectoryRecord> records, std::size_t state_count,
                          std::size_t horizon);

}  // namespace bcn
