#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bcn/network.hpp"
#include "bcn/rational.hpp"
#include "bcn/stp.hpp"

namespace bcn {

/// Gain vector(s) of a linear Lyapunov function V = g^T x. Deterministic and
/// probabilistic certificates carry one gain vector; markovian ones carry one
/// per mode. The last entry of every gain vector is zero.
struct LyapunovCertificate {
  NetworkClass kind = NetworkClass::deterministic;
  std::vector<RationalVector> gains;
  Rational min_slack;
  Rational contraction_ratio;

  const RationalVector& gain(std::size_t mode = 0) const { return gains.at(mode); }
};

/// Why a closed loop admits no certificate. `witness` is a cycle of states
/// (deterministic), or the offending component(s) of the stacked solve.
struct NotStabilized {
  std::string reason;
  std::vector<std::size_t> witness;
};

using SynthesisResult = std::variant<LyapunovCertificate, NotStabilized>;

/// Block split of a square matrix at 2^n - 1.
struct PartitionedMatrix {
  RationalMatrix m11;
  RationalVector m12;  // column
  RationalVector m21;  // row
  Rational m22;
};

PartitionedMatrix partition(const RationalMatrix& m);
RationalMatrix reassemble(const PartitionedMatrix& p);

/// F K Phi as an index composition: column x is F[(K[x]-1) 2^n + x].
LogicalMatrix closed_loop_deterministic(const LogicalMatrix& f, const LogicalMatrix& k);

/// sum_i p_i G_i K Phi; column-stochastic.
RationalMatrix expected_closed_loop(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                                    const LogicalMatrix& k);

std::vector<LogicalMatrix> closed_loop_markovian(std::span<const LogicalMatrix> hs,
                                                 const LogicalMatrix& k);

/// True iff the last column is delta^{last}.
bool check_fixed_point(const LogicalMatrix& m);
bool check_fixed_point(const RationalMatrix& m);

/// Unit right-hand-side constructions: the returned gains satisfy each
/// decrease inequality with slack exactly 1.
SynthesisResult synth_deterministic(const LogicalMatrix& closed_loop);
SynthesisResult synth_probabilistic(const RationalMatrix& expected_closed_loop);
SynthesisResult synth_markovian(std::span<const LogicalMatrix> closed_loops, const RationalMatrix& pi);

/// Closed-loop system a certificate is checked against.
struct ClosedLoop {
  NetworkClass kind = NetworkClass::deterministic;
  LogicalMatrix deterministic;               // deterministic
  RationalMatrix expected;                   // probabilistic
  std::vector<LogicalMatrix> per_mode;       // markovian
  RationalMatrix pi;                         // markovian
};

/// Builds the closed loop of `net` under feedback `k`.
ClosedLoop close_loop(const CompiledNetwork& net, const LogicalMatrix& k);

/// Dispatches to the synthesis routine matching the closed loop's class.
SynthesisResult synthesize(const ClosedLoop& loop);

struct VerificationReport {
  bool valid = false;
  Rational min_slack;
  Rational contraction_ratio;
  /// Slack V(x) - E[V(next)] per transient state; for markovian systems the
  /// entries are grouped by mode (mode-major).
  RationalVector slacks;
  std::vector<std::string> violations;
};

VerificationReport verify_certificate(const LyapunovCertificate& cert, const ClosedLoop& loop);

/// Exact Gaussian elimination. Returns nullopt when `a` is singular.
std::optional<RationalVector> solve_exact(RationalMatrix a, RationalVector b);

}  // namespace bcn
