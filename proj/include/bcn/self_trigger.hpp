#pragma once

// Self-triggered sampling: at each sampling instant pick the longest horizon
// M over which some constant control keeps the (expected) Lyapunov value
// strictly decreasing, with equality allowed only after exact absorption at
// the equilibrium.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcn/lyapunov.hpp"
#include "bcn/network.hpp"
#include "bcn/rational.hpp"
#include "bcn/stp.hpp"

namespace bcn {

/// Horizon classification of one constant control.
struct ControlHorizon {
  std::optional<std::size_t> max_m;        // nullopt: unbounded
  std::optional<std::size_t> absorbed_at;  // first step with all mass at the equilibrium
  bool capped = false;                     // enumeration stopped at M_max

  bool unbounded() const { return !max_m.has_value(); }
  /// True when the control belongs to U_M.
  bool admits(std::size_t m) const { return unbounded() || *max_m >= m; }
};

struct TriggerDecision {
  std::optional<std::size_t> tau;  // nullopt: no further trigger
  std::vector<std::size_t> control_set;
  std::size_t chosen = 0;
  bool capped = false;
  std::vector<ControlHorizon> horizons;  // indexed by control - 1

  bool no_further_trigger() const { return !tau.has_value(); }
};

/// No control yields even one step of decrease from this sample.
class DeadEnd : public std::runtime_error {
 public:
  DeadEnd(std::size_t state, std::optional<std::size_t> mode);

  std::size_t state() const { return state_; }
  std::optional<std::size_t> mode() const { return mode_; }

 private:
  std::size_t state_;
  std::optional<std::size_t> mode_;
};

/// 4 * 2^n, unless BCN_MMAX holds a positive integer.
std::size_t default_mmax(std::size_t n);

/// Exact distributions of the constant-control dynamics. For probabilistic
/// networks each step holds one vector over states; for markovian networks
/// step i holds the joint sub-distributions q_j(i), one per mode.
struct ExpectedTrajectory {
  std::size_t horizon = 0;
  std::vector<std::vector<RationalVector>> distributions;  // horizon + 1 steps
  std::vector<Rational> expected_v;
};

// Deterministic networks. States and controls are 1-based indices.
ControlHorizon det_horizon(const LogicalMatrix& f, const RationalVector& lambda, std::size_t x,
                           std::size_t u);
TriggerDecision det_trigger(const LogicalMatrix& f, const RationalVector& lambda, std::size_t x);

// Probabilistic networks.
ExpectedTrajectory prob_expected_trajectory(std::span<const LogicalMatrix> gs,
                                            std::span<const Rational> p, const RationalVector& nu,
                                            std::size_t u, std::size_t y0, std::size_t horizon);
ControlHorizon prob_horizon(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                            const RationalVector& nu, std::size_t y, std::size_t u, std::size_t mmax);
TriggerDecision prob_trigger(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                             const RationalVector& nu, std::size_t y, std::size_t mmax);

// Markovian networks; sigma0 is the 1-based mode observed at the sample.
ExpectedTrajectory markov_expected_trajectory(std::span<const LogicalMatrix> hs,
                                              const RationalMatrix& pi,
                                              std::span<const RationalVector> omega, std::size_t u,
                                              std::size_t z0, std::size_t sigma0,
                                              std::size_t horizon);
ControlHorizon markov_horizon(std::span<const LogicalMatrix> hs, const RationalMatrix& pi,
                              std::span<const RationalVector> omega, std::size_t z,
                              std::size_t sigma0, std::size_t u, std::size_t mmax);
TriggerDecision markov_trigger(std::span<const LogicalMatrix> hs, const RationalMatrix& pi,
                               std::span<const RationalVector> omega, std::size_t z,
                               std::size_t sigma0, std::size_t mmax);

/// Class dispatch on internal coordinates. `mode` is ignored unless markovian.
TriggerDecision trigger(const CompiledNetwork& net, const LyapunovCertificate& cert,
                        std::size_t state, std::size_t mode, std::size_t mmax);

struct ScheduleEntry {
  std::size_t t = 0;
  std::size_t state = 0;
  std::size_t control = 0;
  std::optional<std::size_t> tau;  // nullopt: no further trigger

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct ScheduleRow {
  std::size_t initial_state = 0;
  std::optional<std::size_t> mode;  // markovian rows
  std::vector<ScheduleEntry> entries;
  bool capped = false;
};

/// Deterministic rows follow the closed-loop trajectory until no further
/// trigger. Stochastic rows hold the single decision taken at t = 0.
struct ScheduleTable {
  NetworkClass kind = NetworkClass::deterministic;
  std::vector<ScheduleRow> rows;
};

/// Internal coordinates, one row per initial state.
ScheduleTable det_schedule_table(const LogicalMatrix& f, const RationalVector& lambda);

/// All rows of `net` in user coordinates.
ScheduleTable schedule_table(const CompiledNetwork& net, const LyapunovCertificate& cert,
                             std::size_t mmax);

/// Single row (user coordinates); `mode` is 1-based and used only for
/// markovian networks.
ScheduleRow schedule_row(const CompiledNetwork& net, const LyapunovCertificate& cert,
                         std::size_t user_state, std::size_t mode, std::size_t mmax);

}  // namespace bcn
