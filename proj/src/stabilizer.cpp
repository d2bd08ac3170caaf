#include "bcn/stabilizer.hpp"

#include <stdexcept>

namespace bcn {

namespace {

std::size_t control_count_of(const LogicalMatrix& f) {
  if (f.rows() < 2 || f.cols() % f.rows() != 0) {
    throw DimensionError("transition matrix " + std::to_string(f.rows()) + "x" +
                         std::to_string(f.cols()) + " is not 2^n x 2^{n+m}");
  }
  return f.cols() / f.rows();
}

}  // namespace

std::vector<std::size_t> reachability_layers(const LogicalMatrix& f) {
  const std::size_t controls = control_count_of(f);
  const std::size_t d = f.rows();
  std::vector<std::size_t> layer(d, kUnreached);
  layer[d - 1] = 0;
  for (std::size_t k = 0;; ++k) {
    std::vector<std::size_t> fresh;
    for (std::size_t x = 1; x <= d; ++x) {
      if (layer[x - 1] != kUnreached) continue;
      for (std::size_t u = 1; u <= controls; ++u) {
        if (layer[successor(f, u, x) - 1] == k) {
          fresh.push_back(x);
          break;
        }
      }
    }
    if (fresh.empty()) break;
    for (std::size_t x : fresh) layer[x - 1] = k + 1;
  }
  return layer;
}

std::variant<FeedbackGain, NotStabilizable> synth_feedback(const LogicalMatrix& f) {
  const std::size_t controls = control_count_of(f);
  const std::size_t d = f.rows();
  std::vector<std::size_t> gain(d, 0);
  for (std::size_t u = 1; u <= controls && gain[d - 1] == 0; ++u)
    if (successor(f, u, d) == d) gain[d - 1] = u;
  if (gain[d - 1] == 0) {
    std::vector<std::size_t> all(d);
    for (std::size_t x = 1; x <= d; ++x) all[x - 1] = x;
    return NotStabilizable{"no control keeps the equilibrium fixed", std::move(all)};
  }

  const auto layer = reachability_layers(f);
  std::vector<std::size_t> unreached;
  for (std::size_t x = 1; x < d; ++x) {
    if (layer[x - 1] == kUnreached) {
      unreached.push_back(x);
      continue;
    }
    for (std::size_t u = 1; u <= controls; ++u) {
      if (layer[successor(f, u, x) - 1] + 1 == layer[x - 1]) {
        gain[x - 1] = u;
        break;
      }
    }
  }
  if (!unreached.empty()) {
    return NotStabilizable{"states cannot be steered to the equilibrium", std::move(unreached)};
  }
  return FeedbackGain{LogicalMatrix(controls, std::move(gain)), FeedbackGain::Provenance::synthesized};
}

FeedbackCheck verify_feedback(const CompiledNetwork& net, const LogicalMatrix& k) {
  FeedbackCheck check;
  check.result = synthesize(close_loop(net, k));
  check.stabilizing = std::holds_alternative<LyapunovCertificate>(check.result);
  return check;
}

}  // namespace bcn
