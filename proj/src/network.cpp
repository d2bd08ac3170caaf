#include "bcn/network.hpp"

#include <stdexcept>

namespace bcn {

std::string_view to_string(NetworkClass c) {
  switch (c) {
    case NetworkClass::deterministic: return "deterministic";
    case NetworkClass::probabilistic: return "probabilistic";
    case NetworkClass::markovian: return "markovian";
  }
  return "unknown";
}

NetworkClass parse_network_class(std::string_view text) {
  if (text == "deterministic") return NetworkClass::deterministic;
  if (text == "probabilistic") return NetworkClass::probabilistic;
  if (text == "markovian") return NetworkClass::markovian;
  throw std::invalid_argument("unknown network class '" + std::string(text) + "'");
}

std::size_t CompiledNetwork::to_internal(std::size_t user_state) const {
  if (user_state == 0 || user_state > state_count()) {
    throw std::invalid_argument("state index " + std::to_string(user_state) + " outside [1, " +
                                std::to_string(state_count()) + "]");
  }
  return permutation.column(user_state);
}

std::size_t CompiledNetwork::to_user(std::size_t internal_state) const {
  // The permutation is an involution.
  return permutation.column(internal_state);
}

void CompiledNetwork::validate() const {
  if (n == 0) throw std::invalid_argument("network must have at least one state node");
  if (n + m >= 40) throw CapacityError("network has too many encoded bits");
  if (modes.empty()) throw std::invalid_argument("network has no transition matrix");
  const std::size_t rows = state_count();
  const std::size_t cols = rows * control_count();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].rows() != rows || modes[i].cols() != cols) {
      throw std::invalid_argument("mode " + std::to_string(i + 1) + " matrix is " +
                                  std::to_string(modes[i].rows()) + "x" +
                                  std::to_string(modes[i].cols()) + ", expected " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  if (permutation.rows() != rows || permutation.cols() != rows) {
    throw std::invalid_argument("permutation has wrong shape");
  }
  for (std::size_t i = 1; i <= rows; ++i) {
    if (permutation.column(permutation.column(i)) != i) {
      throw std::invalid_argument("permutation is not an involution");
    }
  }

  switch (kind) {
    case NetworkClass::deterministic:
      if (modes.size() != 1) throw std::invalid_argument("deterministic network needs one mode");
      break;
    case NetworkClass::probabilistic: {
      if (probs.size() != modes.size()) {
        throw std::invalid_argument("probability count differs from mode count");
      }
      Rational sum = 0;
      for (const auto& p : probs) {
        if (sgn(p) <= 0) throw std::invalid_argument("mode probabilities must be positive");
        sum += p;
      }
      if (sum != 1) {
        throw std::invalid_argument("probabilities do not sum to 1 (sum is " + to_string(sum) +
                                    ")");
      }
      break;
    }
    case NetworkClass::markovian: {
      const std::size_t r = modes.size();
      if (pi.rows() != r || pi.cols() != r) {
        throw std::invalid_argument("mode transition matrix must be " + std::to_string(r) + "x" +
                                    std::to_string(r));
      }
      for (std::size_t i = 0; i < r; ++i) {
        Rational sum = 0;
        for (std::size_t j = 0; j < r; ++j) {
          if (sgn(pi.at(i, j)) < 0) throw std::invalid_argument("negative mode transition");
          sum += pi.at(i, j);
        }
        if (sum != 1) {
          throw std::invalid_argument("mode transition row " + std::to_string(i + 1) +
                                      " sums to " + to_string(sum));
        }
      }
      if (!is_irreducible(pi)) throw std::invalid_argument("mode chain is not irreducible");
      break;
    }
  }
}

bool is_irreducible(const RationalMatrix& pi) {
  const std::size_t r = pi.rows();
  const auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(r, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < r; ++j) {
        const auto& w = forward ? pi.at(i, j) : pi.at(j, i);
        if (sgn(w) > 0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    for (bool s : seen)
      if (!s) return false;
    return true;
  };
  return r > 0 && reaches_all(true) && reaches_all(false);
}

}  // namespace bcn
