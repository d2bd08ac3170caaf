#include "bcn/self_trigger.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <set>
#include <utility>

namespace bcn {

namespace {

// Constant-control dynamics over nodes (mode, state); node = mode * d + state - 1.
struct JointChain {
  std::size_t d = 0;
  std::size_t modes = 1;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> next;
  RationalVector value;
  bool fixes_equilibrium = true;

  std::size_t node(std::size_t mode, std::size_t state) const { return mode * d + state - 1; }
  bool transient(std::size_t node) const { return node % d != d - 1; }
};

void require_index(std::size_t value, std::size_t limit, const char* what) {
  if (value == 0 || value > limit) {
    throw std::invalid_argument(std::string(what) + " index " + std::to_string(value) +
                                " outside [1, " + std::to_string(limit) + "]");
  }
}

std::size_t controls_of(const LogicalMatrix& f) {
  if (f.rows() < 2 || f.cols() % f.rows() != 0) {
    throw DimensionError("transition matrix is not 2^n x 2^{n+m}");
  }
  return f.cols() / f.rows();
}

void require_modes(std::span<const LogicalMatrix> ms, std::span<const RationalVector> gains) {
  if (ms.empty()) throw std::invalid_argument("network has no modes");
  const std::size_t d = ms.front().rows();
  for (const auto& m : ms) {
    if (m.rows() != d || m.cols() != ms.front().cols()) throw DimensionError("mode shapes differ");
  }
  controls_of(ms.front());
  for (const auto& g : gains) {
    if (g.size() != d) {
      throw DimensionError("gain vector has " + std::to_string(g.size()) + " entries, expected " +
                           std::to_string(d));
    }
  }
}

JointChain deterministic_chain(const LogicalMatrix& f, const RationalVector& lambda, std::size_t u) {
  require_modes(std::span(&f, 1), std::span(&lambda, 1));
  require_index(u, controls_of(f), "control");
  JointChain c;
  c.d = f.rows();
  c.value = lambda;
  c.next.resize(c.d);
  for (std::size_t x = 1; x <= c.d; ++x) c.next[x - 1].emplace_back(successor(f, u, x) - 1, 1);
  c.fixes_equilibrium = successor(f, u, c.d) == c.d;
  return c;
}

JointChain probabilistic_chain(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                               const RationalVector& nu, std::size_t u) {
  require_modes(gs, std::span(&nu, 1));
  if (p.size() != gs.size()) throw std::invalid_argument("need one probability per mode");
  require_index(u, controls_of(gs.front()), "control");
  JointChain c;
  c.d = gs.front().rows();
  c.value = nu;
  c.next.resize(c.d);
  for (std::size_t x = 1; x <= c.d; ++x) {
    auto& out = c.next[x - 1];
    for (std::size_t j = 0; j < gs.size(); ++j) {
      const std::size_t y = successor(gs[j], u, x) - 1;
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == y; });
      if (it == out.end()) out.emplace_back(y, p[j]);
      else it->second += p[j];
    }
  }
  for (const auto& g : gs) c.fixes_equilibrium = c.fixes_equilibrium && successor(g, u, c.d) == c.d;
  return c;
}

JointChain markovian_chain(std::span<const LogicalMatrix> hs, const RationalMatrix& pi,
                           std::span<const RationalVector> omega, std::size_t u) {
  require_modes(hs, omega);
  const std::size_t r = hs.size();
  if (pi.rows() != r || pi.cols() != r) throw DimensionError("mode transition matrix must be r x r");
  if (omega.size() != r) throw DimensionError("need one gain vector per mode");
  require_index(u, controls_of(hs.front()), "control");
  JointChain c;
  c.d = hs.front().rows();
  c.modes = r;
  c.next.resize(r * c.d);
  for (std::size_t i = 0; i < r; ++i) {
    c.value.insert(c.value.end(), omega[i].begin(), omega[i].end());
    for (std::size_t a = 1; a <= c.d; ++a) {
      const std::size_t b = successor(hs[i], u, a);
      for (std::size_t j = 0; j < r; ++j)
        if (sgn(pi.at(i, j)) != 0) c.next[c.node(i, a)].emplace_back(c.node(j, b), pi.at(i, j));
    }
    c.fixes_equilibrium = c.fixes_equilibrium && successor(hs[i], u, c.d) == c.d;
  }
  return c;
}

RationalVector step(const JointChain& c, const RationalVector& dist) {
  RationalVector out(dist.size(), Rational(0));
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (sgn(dist[k]) == 0) continue;
    for (const auto& [to, w] : c.next[k]) out[to] += dist[k] * w;
  }
  return out;
}

Rational expected_value(const JointChain& c, const RationalVector& dist) {
  Rational e = 0;
  for (std::size_t k = 0; k < dist.size(); ++k)
    if (sgn(dist[k]) != 0) e += dist[k] * c.value[k];
  return e;
}

bool absorbed(const JointChain& c, const RationalVector& dist) {
  for (std::size_t k = 0; k < dist.size(); ++k)
    if (c.transient(k) && sgn(dist[k]) != 0) return false;
  return true;
}

// Strict one-step decrease of V at every transient node reachable from start.
bool contracts_from(const JointChain& c, std::size_t start) {
  std::vector<bool> seen(c.next.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    if (c.transient(k)) {
      Rational e = 0;
      for (const auto& [to, w] : c.next[k]) e += w * c.value[to];
      if (!(e < c.value[k])) return false;
    }
    for (const auto& [to, w] : c.next[k]) {
      if (!seen[to]) {
        seen[to] = true;
        stack.push_back(to);
      }
    }
  }
  return true;
}

// Proves that E V keeps strictly decreasing after the first `checked` steps
// until exact absorption. With w the one-step drop of V and a_s = P^s w, once
// a_s >= 0 on the reachable set every later drop is a nonnegative mix of a_s;
// it stays positive as long as each time-j support from start meets
// {a_s > 0} or lies entirely at the equilibrium.
bool decreases_forever(const JointChain& c, std::size_t start, std::size_t checked) {
  const std::size_t size = c.next.size();
  std::vector<bool> reach(size, false);
  std::vector<std::size_t> stack{start};
  reach[start] = true;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    for (const auto& [to, w] : c.next[k]) {
      if (!reach[to]) {
        reach[to] = true;
        stack.push_back(to);
      }
    }
  }
  RationalVector a(size, Rational(0));
  for (std::size_t k = 0; k < size; ++k) {
    if (!reach[k]) continue;
    a[k] = c.value[k];
    for (const auto& [to, w] : c.next[k]) a[k] -= w * c.value[to];
  }
  for (std::size_t s = 0; s <= checked; ++s) {
    if (s > 0) {
      RationalVector b(size, Rational(0));
      for (std::size_t k = 0; k < size; ++k)
        if (reach[k])
          for (const auto& [to, w] : c.next[k]) b[k] += w * a[to];
      a = std::move(b);
    }
    bool nonnegative = true;
    for (std::size_t k = 0; k < size && nonnegative; ++k) nonnegative = !reach[k] || sgn(a[k]) >= 0;
    if (!nonnegative) continue;

    constexpr std::size_t kMaxSupports = std::size_t{1} << 16;
    std::set<std::vector<bool>> seen;
    std::vector<bool> support(size, false);
    support[start] = true;
    while (seen.insert(support).second) {
      if (seen.size() > kMaxSupports) return false;
      bool settled = true;
      bool positive = false;
      for (std::size_t k = 0; k < size; ++k) {
        if (!support[k]) continue;
        if (c.transient(k)) settled = false;
        if (sgn(a[k]) > 0) positive = true;
      }
      if (!settled && !positive) return false;
      std::vector<bool> next(size, false);
      for (std::size_t k = 0; k < size; ++k)
        if (support[k])
          for (const auto& [to, w] : c.next[k]) next[to] = true;
      support = std::move(next);
    }
    return true;
  }
  return false;
}

// Every node reachable from start has a path to an equilibrium node.
bool reaches_equilibrium(const JointChain& c, std::size_t start) {
  const std::size_t size = c.next.size();
  std::vector<std::vector<std::size_t>> preds(size);
  for (std::size_t k = 0; k < size; ++k)
    for (const auto& [to, w] : c.next[k]) preds[to].push_back(k);
  std::vector<bool> good(size, false);
  std::vector<std::size_t> stack;
  for (std::size_t k = 0; k < size; ++k)
    if (!c.transient(k)) {
      good[k] = true;
      stack.push_back(k);
    }
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    for (std::size_t p : preds[k])
      if (!good[p]) {
        good[p] = true;
        stack.push_back(p);
      }
  }
  std::vector<bool> seen(size, false);
  stack = {start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    if (!good[k]) return false;
    for (const auto& [to, w] : c.next[k])
      if (!seen[to]) {
        seen[to] = true;
        stack.push_back(to);
      }
  }
  return true;
}

ControlHorizon classify(const JointChain& c, std::size_t start, std::size_t limit, bool use_certificate) {
  ControlHorizon h;
  if (use_certificate && c.fixes_equilibrium && contracts_from(c, start)) return h;
  RationalVector dist(c.next.size(), Rational(0));
  dist[start] = 1;
  Rational ev = c.value[start];
  if (absorbed(c, dist)) {
    h.absorbed_at = 0;
    if (c.fixes_equilibrium) return h;
  }
  std::size_t count = 0;
  for (std::size_t i = 1; i <= limit; ++i) {
    dist = step(c, dist);
    const Rational next_ev = expected_value(c, dist);
    if (!(next_ev < ev)) {
      h.max_m = count;
      return h;
    }
    count = i;
    ev = next_ev;
    if (absorbed(c, dist)) {
      if (!h.absorbed_at) h.absorbed_at = i;
      if (c.fixes_equilibrium) return h;
    }
  }
  if (use_certificate && c.fixes_equilibrium && reaches_equilibrium(c, start) &&
      decreases_forever(c, start, limit)) {
    h.max_m.reset();
    return h;
  }
  h.max_m = count;
  h.capped = true;
  return h;
}

Rational one_step_value(const JointChain& c, std::size_t start) {
  Rational e = 0;
  for (const auto& [to, w] : c.next[start]) e += w * c.value[to];
  return e;
}

template <typename MakeChain>
TriggerDecision decide(std::size_t controls, MakeChain make_chain, std::size_t state,
                       std::optional<std::size_t> mode, std::size_t limit, bool use_certificate) {
  TriggerDecision dec;
  std::vector<Rational> next_value(controls);
  bool any_unbounded = false;
  std::size_t best = 0;
  for (std::size_t u = 1; u <= controls; ++u) {
    const JointChain c = make_chain(u);
    const std::size_t start = c.node(mode ? *mode - 1 : 0, state);
    dec.horizons.push_back(classify(c, start, limit, use_certificate));
    next_value[u - 1] = one_step_value(c, start);
    const auto& h = dec.horizons.back();
    if (h.unbounded()) any_unbounded = true;
    else best = std::max(best, *h.max_m);
  }
  if (!any_unbounded && best == 0) throw DeadEnd(state, mode);
  if (!any_unbounded) dec.tau = best;
  for (std::size_t u = 1; u <= controls; ++u) {
    const auto& h = dec.horizons[u - 1];
    const bool member = any_unbounded ? h.unbounded() : (!h.unbounded() && *h.max_m == best);
    if (!member) continue;
    dec.control_set.push_back(u);
    dec.capped = dec.capped || h.capped;
    if (dec.chosen == 0 || next_value[u - 1] < next_value[dec.chosen - 1]) dec.chosen = u;
  }
  return dec;
}

ExpectedTrajectory trajectory_of(const JointChain& c, std::size_t start, std::size_t horizon) {
  ExpectedTrajectory t;
  t.horizon = horizon;
  RationalVector dist(c.next.size(), Rational(0));
  dist[start] = 1;
  for (std::size_t i = 0;; ++i) {
    std::vector<RationalVector> per_mode(c.modes);
    for (std::size_t j = 0; j < c.modes; ++j) {
      per_mode[j].assign(dist.begin() + static_cast<std::ptrdiff_t>(j * c.d),
                         dist.begin() + static_cast<std::ptrdiff_t>((j + 1) * c.d));
    }
    t.distributions.push_back(std::move(per_mode));
    t.expected_v.push_back(expected_value(c, dist));
    if (i == horizon) break;
    dist = step(c, dist);
  }
  return t;
}

}  // namespace

DeadEnd::DeadEnd(std::size_t state, std::optional<std::size_t> mode)
    : std::runtime_error("no control decreases V from state " + std::to_string(state) +
                         (mode ? " in mode " + std::to_string(*mode) : std::string())),
      state_(state),
      mode_(mode) {}

std::size_t default_mmax(std::size_t n) {
  if (const char* env = std::getenv("BCN_MMAX")) {
    std::size_t value = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) return value;
  }
  return std::size_t{4} << n;
}

ControlHorizon det_horizon(const LogicalMatrix& f, const RationalVector& lambda, std::size_t x,
                           std::size_t u) {
  const JointChain c = deterministic_chain(f, lambda, u);
  require_index(x, c.d, "state");
  return classify(c, c.node(0, x), c.d, false);
}

TriggerDecision det_trigger(const LogicalMatrix& f, const RationalVector& lambda, std::size_t x) {
  require_index(x, f.rows(), "state");
  return decide(
      controls_of(f), [&](std::size_t u) { return deterministic_chain(f, lambda, u); }, x,
      std::nullopt, f.rows(), false);
}

ExpectedTrajectory prob_expected_trajectory(std::span<const LogicalMatrix> gs,
                                            std::span<const Rational> p, const RationalVector& nu,
                                            std::size_t u, std::size_t y0, std::size_t horizon) {
  const JointChain c = probabilistic_chain(gs, p, nu, u);
  require_index(y0, c.d, "state");
  return trajectory_of(c, c.node(0, y0), horizon);
}

ControlHorizon prob_horizon(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                            const RationalVector& nu, std::size_t y, std::size_t u, std::size_t mmax) {
  const JointChain c = probabilistic_chain(gs, p, nu, u);
  require_index(y, c.d, "state");
  return classify(c, c.node(0, y), mmax, true);
}

TriggerDecision prob_trigger(std::span<const LogicalMatrix> gs, std::span<const Rational> p,
                             const RationalVector& nu, std::size_t y, std::size_t mmax) {
  require_modes(gs, std::span(&nu, 1));
  require_index(y, gs.front().rows(), "state");
  return decide(
      controls_of(gs.front()), [&](std::size_t u) { return probabilistic_chain(gs, p, nu, u); }, y,
      std::nullopt, mmax, true);
}

ExpectedTrajectory markov_expected_trajectory(std::span<const LogicalMatrix> hs,
                                              const RationalMatrix& pi,
                                              std::span<const RationalVector> omega, std::size_t u,
                                              std::size_t z0, std::size_t sigma0,
                                              std::size_t horizon) {
  const JointChain c = markovian_chain(hs, pi, omega, u);
  require_index(z0, c.d, "state");
  require_index(sigma0, c.modes, "mode");
  return trajectory_of(c, c.node(sigma0 - 1, z0), horizon);
}

ControlHorizon markov_horizon(std::span<const LogicalMatrix> hs, const RationalMatrix& pi,
                              std::span<const RationalVector> omega, std::size_t z,
                              std::size_t sigma0, std::size_t u, std::size_t mmax) {
  const JointChain c = markovian_chain(hs, pi, omega, u);
  require_index(z, c.d, "state");
  require_index(sigma0, c.modes, "mode");
  return classify(c, c.node(sigma0 - 1, z), mmax, true);
}

TriggerDecision markov_trigger(std::span<const LogicalMatrix> hs, const RationalMatrix& pi,
                               std::span<const RationalVector> omega, std::size_t z,
                               std::size_t sigma0, std::size_t mmax) {
  require_modes(hs, omega);
  require_index(z, hs.front().rows(), "state");
  require_index(sigma0, hs.size(), "mode");
  return decide(
      controls_of(hs.front()), [&](std::size_t u) { return markovian_chain(hs, pi, omega, u); }, z,
      sigma0, mmax, true);
}

TriggerDecision trigger(const CompiledNetwork& net, const LyapunovCertificate& cert,
                        std::size_t state, std::size_t mode, std::size_t mmax) {
  if (cert.kind != net.kind) {
    throw std::invalid_argument("certificate class " + std::string(to_string(cert.kind)) +
                                " does not match network class " + std::string(to_string(net.kind)));
  }
  switch (net.kind) {
    case NetworkClass::deterministic: return det_trigger(net.modes.front(), cert.gain(), state);
    case NetworkClass::probabilistic: return prob_trigger(net.modes, net.probs, cert.gain(), state, mmax);
    case NetworkClass::markovian: return markov_trigger(net.modes, net.pi, cert.gains, state, mode, mmax);
  }
  throw std::logic_error("unknown network class");
}

ScheduleTable det_schedule_table(const LogicalMatrix& f, const RationalVector& lambda) {
  ScheduleTable table;
  const std::size_t d = f.rows();
  for (std::size_t x0 = 1; x0 <= d; ++x0) {
    ScheduleRow row;
    row.initial_state = x0;
    std::size_t x = x0;
    std::size_t t = 0;
    for (;;) {
      if (row.entries.size() > d) throw std::logic_error("schedule does not terminate");
      const TriggerDecision dec = det_trigger(f, lambda, x);
      row.entries.push_back({t, x, dec.chosen, dec.tau});
      if (!dec.tau) break;
      for (std::size_t i = 0; i < *dec.tau; ++i) x = successor(f, dec.chosen, x);
      t += *dec.tau;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ScheduleRow schedule_row(const CompiledNetwork& net, const LyapunovCertificate& cert,
                         std::size_t user_state, std::size_t mode, std::size_t mmax) {
  const std::size_t x0 = net.to_internal(user_state);
  ScheduleRow row;
  row.initial_state = user_state;
  if (net.kind == NetworkClass::markovian) {
    require_index(mode, net.mode_count(), "mode");
    row.mode = mode;
  }
  if (net.kind != NetworkClass::deterministic) {
    const TriggerDecision dec = trigger(net, cert, x0, mode, mmax);
    row.entries.push_back({0, user_state, dec.chosen, dec.tau});
    row.capped = dec.capped;
    return row;
  }
  const LogicalMatrix& f = net.modes.front();
  std::size_t x = x0;
  std::size_t t = 0;
  for (;;) {
    if (row.entries.size() > net.state_count()) throw std::logic_error("schedule does not terminate");
    const TriggerDecision dec = det_trigger(f, cert.gain(), x);
    row.entries.push_back({t, net.to_user(x), dec.chosen, dec.tau});
    if (!dec.tau) break;
    for (std::size_t i = 0; i < *dec.tau; ++i) x = successor(f, dec.chosen, x);
    t += *dec.tau;
  }
  return row;
}

ScheduleTable schedule_table(const CompiledNetwork& net, const LyapunovCertificate& cert,
                             std::size_t mmax) {
  ScheduleTable table;
  table.kind = net.kind;
  const std::size_t modes = net.kind == NetworkClass::markovian ? net.mode_count() : 1;
  for (std::size_t x = 1; x <= net.state_count(); ++x)
    for (std::size_t mode = 1; mode <= modes; ++mode)
      table.rows.push_back(schedule_row(net, cert, x, mode, mmax));
  return table;
}

}  // namespace bcn
