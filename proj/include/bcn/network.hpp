#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bcn/rational.hpp"
#include "bcn/stp.hpp"

namespace bcn {

enum class NetworkClass { deterministic, probabilistic, markovian };

std::string_view to_string(NetworkClass c);
NetworkClass parse_network_class(std::string_view text);

/// Algebraic form of a (possibly stochastic) Boolean control network.
///
/// Each mode matrix is 2^n x 2^{n+m}. Column (u-1) 2^n + x holds the next
/// state for control delta_{2^m}^u and state delta_{2^n}^x, i.e. F u x.
/// `permutation` maps user coordinates to internal ones (internal = P user);
/// it is the identity unless the equilibrium was relabeled.
struct CompiledNetwork {
  NetworkClass kind = NetworkClass::deterministic;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<LogicalMatrix> modes;
  RationalVector probs;  // probabilistic: p_i > 0, sum 1
  RationalMatrix pi;     // markovian: row-stochastic r x r
  LogicalMatrix permutation;
  std::vector<std::string> node_names;
  std::vector<std::string> input_names;
  std::vector<std::string> mode_names;

  std::size_t state_count() const { return std::size_t{1} << n; }
  std::size_t control_count() const { return std::size_t{1} << m; }
  std::size_t mode_count() const { return modes.size(); }

  /// Internal index of the user-coordinate state `user_state`.
  std::size_t to_internal(std::size_t user_state) const;
  /// User-coordinate index of internal state `internal_state`.
  std::size_t to_user(std::size_t internal_state) const;

  /// Checks shapes and class-specific probability invariants; throws
  /// std::invalid_argument on the first violation.
  void validate() const;
};

/// Next-state index of `transition` for control u and state x (1-based).
inline std::size_t successor(const LogicalMatrix& transition, std::size_t u, std::size_t x) {
  return transition.column((u - 1) * transition.rows() + x);
}

/// True when the row-stochastic matrix's support graph is strongly connected.
bool is_irreducible(const RationalMatrix& pi);

}  // namespace bcn
