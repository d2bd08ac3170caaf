#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "bcn/lyapunov.hpp"
#include "bcn/network.hpp"
#include "bcn/stp.hpp"

namespace bcn {

struct FeedbackGain {
  enum class Provenance { synthesized, user_supplied };

  LogicalMatrix k;  // 2^m x 2^n
  Provenance provenance = Provenance::user_supplied;
};

struct NotStabilizable {
  std::string reason;
  std::vector<std::size_t> unreached;  // 1-based states
};

/// Backward-reachability layers of the equilibrium: entry x-1 is the least k
/// with x in R_k, or kUnreached.
inline constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);
std::vector<std::size_t> reachability_layers(const LogicalMatrix& f);

/// Time-optimal feedback; ties go to the smallest control index.
std::variant<FeedbackGain, NotStabilizable> synth_feedback(const LogicalMatrix& f);

struct FeedbackCheck {
  bool stabilizing = false;
  SynthesisResult result;  // certificate on success
};

/// Runs the class-matching certificate synthesis on the closed loop.
FeedbackCheck verify_feedback(const CompiledNetwork& net, const LogicalMatrix& k);

}  // namespace bcn
