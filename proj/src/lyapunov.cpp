#include "bcn/lyapunov.hpp"

#include <algorithm>

namespace bcn {

namespace {

void require_square(std::size_t rows, std::size_t cols, const char* what) {
  if (rows != cols || rows < 2) {
    throw DimensionError(std::string(what) + ": expected a square matrix of order >= 2, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_gain_shape(const LogicalMatrix& f, const LogicalMatrix& k) {
  const std::size_t states = f.rows();
  if (k.cols() != states || f.cols() != states * k.rows()) {
    throw DimensionError("feedback gain " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()) + " does not fit transition matrix " +
                         std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
  }
}

LyapunovCertificate certify(NetworkClass kind, std::vector<RationalVector> gains,
                            const ClosedLoop& loop) {
  LyapunovCertificate cert{kind, std::move(gains), 0, 0};
  const VerificationReport report = verify_certificate(cert, loop);
  cert.min_slack = report.min_slack;
  cert.contraction_ratio = report.contraction_ratio;
  return cert;
}

// Follows `next` from `start` until a state repeats; returns the cycle.
template <typename Next>
std::vector<std::size_t> find_cycle(std::size_t start, Next next) {
  std::vector<std::size_t> path;
  std::size_t x = start;
  for (;;) {
    const auto it = std::find(path.begin(), path.end(), x);
    if (it != path.end()) return {it, path.end()};
    path.push_back(x);
    x = next(x);
  }
}

}  // namespace

PartitionedMatrix partition(const RationalMatrix& m) {
  require_square(m.rows(), m.cols(), "partition");
  const std::size_t t = m.rows() - 1;
  PartitionedMatrix p{RationalMatrix(t, t), RationalVector(t), RationalVector(t), m.at(t, t)};
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) p.m11.at(i, j) = m.at(i, j);
    p.m12[i] = m.at(i, t);
    p.m21[i] = m.at(t, i);
  }
  return p;
}

RationalMatrix reassemble(const PartitionedMatrix& p) {
  const std::size_t t = p.m11.rows();
  RationalMatrix m(t + 1, t + 1);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) m.at(i, j) = p.m11.at(i, j);
    m.at(i, t) = p.m12[i];
    m.at(t, i) = p.m21[i];
  }
  m.at(t, t) = p.m22;
  return m;
}

LogicalMatrix closed_loop_deterministic(const LogicalMatrix& f, const LogicalMatrix& k) {
  require_gain_shape(f, k);
  std::vector<std::size_t> cols(f.rows());
  for (std::size_t x = 1; x <= f.rows(); ++x) cols[x - 1] = successor(f, k.column(x), x);
  return LogicalMatrix(f.rows(), std::move(cols));
}

RationalMatrix expected_closed_loop(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                                    const LogicalMatrix& k) {
  if (gs.empty() || gs.size() != p.size()) {
    throw std::invalid_argument("expected_closed_loop: need one probability per mode");
  }
  Rational sum = 0;
  for (const auto& pi : p) {
    if (sgn(pi) <= 0) throw std::invalid_argument("expected_closed_loop: probabilities must be positive");
    sum += pi;
  }
  if (sum != 1) throw std::invalid_argument("expected_closed_loop: probabilities must sum to 1");
  const std::size_t d = gs.front().rows();
  RationalMatrix out(d, d);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    require_gain_shape(gs[i], k);
    if (gs[i].rows() != d) throw DimensionError("expected_closed_loop: mode shapes differ");
    for (std::size_t x = 1; x <= d; ++x) out.at(successor(gs[i], k.column(x), x) - 1, x - 1) += p[i];
  }
  return out;
}

std::vector<LogicalMatrix> closed_loop_markovian(std::span<const LogicalMatrix> hs,
                                                 const LogicalMatrix& k) {
  std::vector<LogicalMatrix> out;
  out.reserve(hs.size());
  for (const auto& h : hs) out.push_back(closed_loop_deterministic(h, k));
  return out;
}

bool check_fixed_point(const LogicalMatrix& m) {
  require_square(m.rows(), m.cols(), "check_fixed_point");
  return m.column(m.cols()) == m.rows();
}

bool check_fixed_point(const RationalMatrix& m) {
  require_square(m.rows(), m.cols(), "check_fixed_point");
  const std::size_t last = m.rows() - 1;
  for (std::size_t i = 0; i < last; ++i)
    if (sgn(m.at(i, last)) != 0) return false;
  return m.at(last, last) == 1;
}

std::optional<RationalVector> solve_exact(RationalMatrix a, RationalVector b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("solve_exact: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a.at(pivot, col)) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != col) {
      for (std::size_t j = col; j < n; ++j) std::swap(a.at(pivot, j), a.at(col, j));
      std::swap(b[pivot], b[col]);
    }
    const Rational inv = 1 / a.at(col, col);
    for (std::size_t j = col; j < n; ++j) a.at(col, j) *= inv;
    b[col] *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || sgn(a.at(i, col)) == 0) continue;
      const Rational factor = a.at(i, col);
      for (std::size_t j = col; j < n; ++j) a.at(i, j) -= factor * a.at(col, j);
      b[i] -= factor * b[col];
    }
  }
  return b;
}

SynthesisResult synth_deterministic(const LogicalMatrix& closed_loop) {
  require_square(closed_loop.rows(), closed_loop.cols(), "synth_deterministic");
  const std::size_t d = closed_loop.rows();
  if (!check_fixed_point(closed_loop)) {
    return NotStabilized{"equilibrium delta^" + std::to_string(d) + " is not a fixed point",
                         {d, closed_loop.column(d)}};
  }
  // lambda_1 = sum_{t=0}^{d-2} (F11^T)^t 1. For a 0/1 block, (F11^T v)(x) is
  // v(F x) when F x is transient and 0 otherwise.
  RationalVector term(d - 1, Rational(1)), acc(d - 1, Rational(0)), next(d - 1);
  for (std::size_t t = 0; t + 1 < d; ++t) {
    for (std::size_t x = 0; x + 1 < d; ++x) acc[x] += term[x];
    for (std::size_t x = 0; x + 1 < d; ++x) {
      const std::size_t y = closed_loop.column(x + 1);
      next[x] = y < d ? term[y - 1] : Rational(0);
    }
    std::swap(term, next);
  }
  // term now holds (F11^T)^{d-1} 1, which vanishes iff F11 is nilpotent.
  for (std::size_t x = 0; x + 1 < d; ++x) {
    if (sgn(term[x]) != 0) {
      auto cycle = find_cycle(x + 1, [&](std::size_t s) { return closed_loop.column(s); });
      return NotStabilized{"closed loop has a cycle avoiding the equilibrium", std::move(cycle)};
    }
  }
  acc.push_back(0);
  ClosedLoop loop;
  loop.kind = NetworkClass::deterministic;
  loop.deterministic = closed_loop;
  return certify(NetworkClass::deterministic, {std::move(acc)}, loop);
}

SynthesisResult synth_probabilistic(const RationalMatrix& expected) {
  require_square(expected.rows(), expected.cols(), "synth_probabilistic");
  if (!expected.is_column_stochastic()) {
    throw std::invalid_argument("synth_probabilistic: matrix is not column-stochastic");
  }
  const std::size_t d = expected.rows();
  if (!check_fixed_point(expected)) {
    return NotStabilized{"equilibrium delta^" + std::to_string(d) + " is not a fixed point", {d}};
  }
  const PartitionedMatrix blocks = partition(expected);
  RationalMatrix system = RationalMatrix::identity(d - 1);
  for (std::size_t i = 0; i + 1 < d; ++i)
    for (std::size_t j = 0; j + 1 < d; ++j) system.at(i, j) -= blocks.m11.at(j, i);
  auto solution = solve_exact(std::move(system), RationalVector(d - 1, Rational(1)));
  if (!solution) return NotStabilized{"I - G11^T is singular", {}};
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < solution->size(); ++i)
    if (sgn((*solution)[i]) <= 0) bad.push_back(i + 1);
  if (!bad.empty()) return NotStabilized{"solution has non-positive components", std::move(bad)};
  solution->push_back(0);
  ClosedLoop loop;
  loop.kind = NetworkClass::probabilistic;
  loop.expected = expected;
  return certify(NetworkClass::probabilistic, {std::move(*solution)}, loop);
}

SynthesisResult synth_markovian(std::span<const LogicalMatrix> closed_loops, const RationalMatrix& pi) {
  const std::size_t r = closed_loops.size();
  if (r == 0 || pi.rows() != r || pi.cols() != r) {
    throw DimensionError("synth_markovian: need an r x r mode transition matrix for r modes");
  }
  const std::size_t d = closed_loops.front().rows();
  for (std::size_t i = 0; i < r; ++i) {
    require_square(closed_loops[i].rows(), closed_loops[i].cols(), "synth_markovian");
    if (closed_loops[i].rows() != d) throw DimensionError("synth_markovian: mode shapes differ");
    if (!check_fixed_point(closed_loops[i])) {
      return NotStabilized{"equilibrium is not a fixed point of mode " + std::to_string(i + 1),
                           {i + 1}};
    }
  }
  // Unknown (i, a) sits at i (d-1) + a. Row (i, a) of A holds pi_ij at
  // (j, H_i a) whenever H_i maps a to a transient state.
  const std::size_t t = d - 1;
  RationalMatrix system = RationalMatrix::identity(r * t);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t a = 1; a <= t; ++a) {
      const std::size_t b = closed_loops[i].column(a);
      if (b == d) continue;
      for (std::size_t j = 0; j < r; ++j) system.at(i * t + a - 1, j * t + b - 1) -= pi.at(i, j);
    }
  }
  auto solution = solve_exact(std::move(system), RationalVector(r * t, Rational(1)));
  if (!solution) return NotStabilized{"stacked system I - A is singular", {}};
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < solution->size(); ++i)
    if (sgn((*solution)[i]) <= 0) bad.push_back(i + 1);
  if (!bad.empty()) return NotStabilized{"stacked solution has non-positive components", std::move(bad)};

  std::vector<RationalVector> gains(r);
  for (std::size_t i = 0; i < r; ++i) {
    gains[i].assign(solution->begin() + static_cast<std::ptrdiff_t>(i * t),
                    solution->begin() + static_cast<std::ptrdiff_t>((i + 1) * t));
    gains[i].push_back(0);
  }
  ClosedLoop loop;
  loop.kind = NetworkClass::markovian;
  loop.per_mode.assign(closed_loops.begin(), closed_loops.end());
  loop.pi = pi;
  return certify(NetworkClass::markovian, std::move(gains), loop);
}

ClosedLoop close_loop(const CompiledNetwork& net, const LogicalMatrix& k) {
  if (k.rows() != net.control_count() || k.cols() != net.state_count()) {
    throw DimensionError("feedback gain must be " + std::to_string(net.control_count()) + "x" +
                         std::to_string(net.state_count()));
  }
  ClosedLoop loop;
  loop.kind = net.kind;
  switch (net.kind) {
    case NetworkClass::deterministic:
      loop.deterministic = closed_loop_deterministic(net.modes.front(), k);
      break;
    case NetworkClass::probabilistic:
      loop.expected = expected_closed_loop(net.modes, net.probs, k);
      break;
    case NetworkClass::markovian:
      loop.per_mode = closed_loop_markovian(net.modes, k);
      loop.pi = net.pi;
      break;
  }
  return loop;
}

SynthesisResult synthesize(const ClosedLoop& loop) {
  switch (loop.kind) {
    case NetworkClass::deterministic: return synth_deterministic(loop.deterministic);
    case NetworkClass::probabilistic: return synth_probabilistic(loop.expected);
    case NetworkClass::markovian: return synth_markovian(loop.per_mode, loop.pi);
  }
  throw std::logic_error("unknown network class");
}

VerificationReport verify_certificate(const LyapunovCertificate& cert, const ClosedLoop& loop) {
  if (cert.kind != loop.kind) {
    throw std::invalid_argument("certificate class " + std::string(to_string(cert.kind)) +
                                " does not match system class " + std::string(to_string(loop.kind)));
  }
  std::size_t d = 0;
  std::size_t modes = 1;
  switch (loop.kind) {
    case NetworkClass::deterministic: d = loop.deterministic.rows(); break;
    case NetworkClass::probabilistic: d = loop.expected.rows(); break;
    case NetworkClass::markovian:
      if (loop.per_mode.empty()) throw DimensionError("markovian system has no modes");
      d = loop.per_mode.front().rows();
      modes = loop.per_mode.size();
      break;
  }
  if (cert.gains.size() != modes) {
    throw DimensionError("certificate has " + std::to_string(cert.gains.size()) +
                         " gain vectors, system needs " + std::to_string(modes));
  }
  for (const auto& g : cert.gains) {
    if (g.size() != d) {
      throw DimensionError("gain vector has " + std::to_string(g.size()) + " entries, expected " +
                           std::to_string(d));
    }
  }

  VerificationReport report;
  for (std::size_t i = 0; i < modes; ++i) {
    const auto& g = cert.gains[i];
    if (sgn(g[d - 1]) != 0) report.violations.push_back("mode " + std::to_string(i + 1) + ": V(equilibrium) != 0");
    for (std::size_t x = 0; x + 1 < d; ++x) {
      if (sgn(g[x]) <= 0) {
        report.violations.push_back("mode " + std::to_string(i + 1) + ": V(delta^" +
                                    std::to_string(x + 1) + ") is not positive");
      }
    }
  }

  // Expected V at the successor of transient state x (0-based) in mode i.
  const auto expected_next = [&](std::size_t i, std::size_t x) -> Rational {
    switch (loop.kind) {
      case NetworkClass::deterministic:
        return cert.gains[0][loop.deterministic.column(x + 1) - 1];
      case NetworkClass::probabilistic: {
        Rational e = 0;
        for (std::size_t y = 0; y < d; ++y) e += loop.expected.at(y, x) * cert.gains[0][y];
        return e;
      }
      case NetworkClass::markovian: {
        const std::size_t y = loop.per_mode[i].column(x + 1) - 1;
        Rational e = 0;
        for (std::size_t j = 0; j < modes; ++j) e += loop.pi.at(i, j) * cert.gains[j][y];
        return e;
      }
    }
    return 0;
  };

  bool fixed = true;
  switch (loop.kind) {
    case NetworkClass::deterministic: fixed = check_fixed_point(loop.deterministic); break;
    case NetworkClass::probabilistic: fixed = check_fixed_point(loop.expected); break;
    case NetworkClass::markovian:
      for (const auto& h : loop.per_mode) fixed = fixed && check_fixed_point(h);
      break;
  }
  if (!fixed) report.violations.push_back("equilibrium is not a fixed point of the closed loop");

  bool first = true;
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t x = 0; x + 1 < d; ++x) {
      const Rational& v = cert.gains[i][x];
      const Rational next = expected_next(i, x);
      const Rational slack = v - next;
      report.slacks.push_back(slack);
      if (sgn(slack) <= 0) {
        report.violations.push_back("mode " + std::to_string(i + 1) + ": V does not decrease at delta^" +
                                    std::to_string(x + 1));
      }
      const Rational ratio = sgn(v) > 0 ? Rational(next / v) : Rational(0);
      if (first || slack < report.min_slack) report.min_slack = slack;
      if (first || ratio > report.contraction_ratio) report.contraction_ratio = ratio;
      first = false;
    }
  }
  report.valid = report.violations.empty();
  return report;
}

}  // namespace bcn
