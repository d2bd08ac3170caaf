#include "bcn/simulation.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace bcn {

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

double uniform01(std::uint64_t seed, std::uint64_t run, std::uint64_t step) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                                static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  const std::uint64_t bits = (std::uint64_t{out[0]} << 21) | (out[1] >> 11);
  return std::ldexp(static_cast<double>(bits), -53);
}

std::vector<double> cumulative_table(std::span<const Rational> probs) {
  if (probs.empty()) throw std::invalid_argument("empty probability table");
  std::vector<double> out;
  Rational acc = 0;
  for (const auto& p : probs) {
    acc += p;
    out.push_back(to_double(acc));
  }
  out.back() = 1.0;
  return out;
}

std::size_t draw_index(std::span<const double> cumulative, double u) {
  for (std::size_t i = 0; i < cumulative.size(); ++i)
    if (u < cumulative[i]) return i;
  return cumulative.size() - 1;
}

ClosedLoopModel::ClosedLoopModel(CompiledNetwork net, LyapunovCertificate cert, std::size_t mmax)
    : net_(std::move(net)), cert_(std::move(cert)), mmax_(mmax == 0 ? default_mmax(net_.n) : mmax) {
  net_.validate();
  if (cert_.kind != net_.kind) {
    throw std::invalid_argument("certificate class " + std::string(to_string(cert_.kind)) +
                                " does not match network class " + std::string(to_string(net_.kind)));
  }
  const std::size_t gains = net_.kind == NetworkClass::markovian ? net_.mode_count() : 1;
  if (cert_.gains.size() != gains) throw DimensionError("certificate has the wrong number of gain vectors");
  for (const auto& g : cert_.gains)
    if (g.size() != net_.state_count()) throw DimensionError("gain vector length differs from 2^n");
  decisions_.resize(state_count() * tracked_modes());
  if (net_.kind == NetworkClass::probabilistic) {
    cumulative_.push_back(cumulative_table(net_.probs));
  } else if (net_.kind == NetworkClass::markovian) {
    for (std::size_t i = 0; i < net_.mode_count(); ++i) {
      RationalVector row(net_.mode_count());
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = net_.pi.at(i, j);
      cumulative_.push_back(cumulative_table(row));
    }
  }
}

std::size_t ClosedLoopModel::tracked_modes() const {
  return net_.kind == NetworkClass::markovian ? net_.mode_count() : 1;
}

const TriggerDecision& ClosedLoopModel::decision(std::size_t state, std::size_t mode) {
  auto& slot = decisions_[(mode - 1) * state_count() + state - 1];
  if (!slot) slot = trigger(net_, cert_, state, mode, mmax_);
  return *slot;
}

const Rational& ClosedLoopModel::value(std::size_t state, std::size_t mode) const {
  return net_.kind == NetworkClass::markovian ? cert_.gains[mode - 1][state - 1]
                                              : cert_.gains[0][state - 1];
}

std::vector<ClosedLoopModel::Transition> ClosedLoopModel::transitions(std::size_t state,
                                                                      std::size_t mode,
                                                                      std::size_t u) const {
  std::vector<Transition> out;
  switch (net_.kind) {
    case NetworkClass::deterministic:
      out.push_back({successor(net_.modes[0], u, state), 1, Rational(1)});
      break;
    case NetworkClass::probabilistic:
      for (std::size_t j = 0; j < net_.mode_count(); ++j)
        out.push_back({successor(net_.modes[j], u, state), 1, net_.probs[j]});
      break;
    case NetworkClass::markovian: {
      const std::size_t next = successor(net_.modes[mode - 1], u, state);
      for (std::size_t j = 0; j < net_.mode_count(); ++j)
        if (sgn(net_.pi.at(mode - 1, j)) != 0) out.push_back({next, j + 1, net_.pi.at(mode - 1, j)});
      break;
    }
  }
  return out;
}

std::pair<std::size_t, std::size_t> ClosedLoopModel::sample(std::size_t state, std::size_t mode,
                                                            std::size_t u, double draw,
                                                            std::size_t& mode_used) const {
  switch (net_.kind) {
    case NetworkClass::deterministic:
      mode_used = 1;
      return {successor(net_.modes[0], u, state), 1};
    case NetworkClass::probabilistic: {
      const std::size_t j = draw_index(cumulative_[0], draw);
      mode_used = j + 1;
      return {successor(net_.modes[j], u, state), 1};
    }
    case NetworkClass::markovian:
      mode_used = mode;
      return {successor(net_.modes[mode - 1], u, state), draw_index(cumulative_[mode - 1], draw) + 1};
  }
  throw std::logic_error("unknown network class");
}

namespace {

struct RunSummary {
  std::vector<std::size_t> states;  // internal, per t
  std::vector<double> values;       // per t
  std::vector<double> trigger_values;
};

RunSummary run_once(ClosedLoopModel& model, const SimulationOptions& opt, std::size_t run,
                    TrajectoryRecord* record) {
  const CompiledNetwork& net = model.network();
  const bool markov = net.kind == NetworkClass::markovian;
  std::size_t x = net.to_internal(opt.initial_state);
  std::size_t mode = markov ? opt.initial_mode : 1;
  RunSummary s;
  const TriggerDecision* dec = &model.decision(x, mode);
  std::size_t control = dec->chosen;
  std::optional<std::size_t> countdown = dec->tau;
  bool triggered = true;
  for (std::size_t t = 0;; ++t) {
    const Rational& v = model.value(x, mode);
    s.states.push_back(x);
    s.values.push_back(to_double(v));
    if (triggered) s.trigger_values.push_back(s.values.back());
    if (record) {
      TrajectoryStep step{t, net.to_user(x), std::nullopt, control, triggered, v};
      if (markov) step.mode = mode;
      record->steps.push_back(std::move(step));
    }
    if (t == opt.horizon) break;
    std::size_t mode_used = 1;
    const double draw = net.kind == NetworkClass::deterministic ? 0.0 : uniform01(opt.seed, run, t);
    std::tie(x, mode) = model.sample(x, mode, control, draw, mode_used);
    if (record && net.kind == NetworkClass::probabilistic) record->steps.back().mode = mode_used;
    triggered = false;
    if (countdown && --*countdown == 0) {
      dec = &model.decision(x, mode);
      control = dec->chosen;
      countdown = dec->tau;
      triggered = true;
    }
  }
  return s;
}

SimulationResult simulate_impl(const CompiledNetwork& net, const LyapunovCertificate& cert,
                               const SimulationOptions& opt) {
  if (opt.runs == 0) throw std::invalid_argument("runs must be positive");
  if (net.kind == NetworkClass::markovian && (opt.initial_mode == 0 || opt.initial_mode > net.mode_count())) {
    throw std::invalid_argument("initial mode " + std::to_string(opt.initial_mode) + " outside [1, " +
                                std::to_string(net.mode_count()) + "]");
  }
  ClosedLoopModel model(net, cert, opt.mmax);
  const std::size_t d = net.state_count();
  SimulationResult result;
  RunStatistics& st = result.stats;
  st.runs = opt.runs;
  st.horizon = opt.horizon;
  st.frac_at_equilibrium.assign(opt.horizon + 1, 0.0);
  st.mean_v.assign(opt.horizon + 1, 0.0);
  std::vector<std::vector<double>> sampled;
  for (std::size_t run = 0; run < opt.runs; ++run) {
    TrajectoryRecord record;
    record.run = opt.first_run + run;
    RunSummary s = run_once(model, opt, record.run, opt.keep_trajectories ? &record : nullptr);
    for (std::size_t t = 0; t <= opt.horizon; ++t) {
      if (s.states[t] == d) st.frac_at_equilibrium[t] += 1.0;
      st.mean_v[t] += s.values[t];
    }
    s.trigger_values.push_back(s.values.back());  // V(y(T)) for missing instants
    sampled.push_back(std::move(s.trigger_values));
    if (opt.keep_trajectories) result.trajectories.push_back(std::move(record));
  }
  const double runs = static_cast<double>(opt.runs);
  for (std::size_t t = 0; t <= opt.horizon; ++t) {
    st.frac_at_equilibrium[t] /= runs;
    st.mean_v[t] /= runs;
  }
  std::size_t instants = 0;
  for (const auto& w : sampled) instants = std::max(instants, w.size() - 1);
  for (std::size_t k = 0; k < instants; ++k) {
    double sum = 0.0;
    for (const auto& w : sampled) sum += w[std::min(k, w.size() - 1)];
    const double mean = sum / runs;
    double sq = 0.0;
    for (const auto& w : sampled) {
      const double dv = w[std::min(k, w.size() - 1)] - mean;
      sq += dv * dv;
    }
    const double var = opt.runs > 1 ? sq / (runs - 1.0) : 0.0;
    st.sampling_mean.push_back(mean);
    st.sampling_std_error.push_back(std::sqrt(var / runs));
  }
  return result;
}

}  // namespace

TrajectoryRecord simulate_deterministic(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                        std::size_t initial_state, std::size_t horizon) {
  if (net.kind != NetworkClass::deterministic) throw std::invalid_argument("network is not deterministic");
  SimulationOptions opt;
  opt.initial_state = initial_state;
  opt.horizon = horizon;
  opt.keep_trajectories = true;
  return std::move(simulate_impl(net, cert, opt).trajectories.front());
}

SimulationResult simulate_probabilistic(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                        const SimulationOptions& options) {
  if (net.kind != NetworkClass::probabilistic) throw std::invalid_argument("network is not probabilistic");
  return simulate_impl(net, cert, options);
}

SimulationResult simulate_markovian(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                    const SimulationOptions& options) {
  if (net.kind != NetworkClass::markovian) throw std::invalid_argument("network is not markovian");
  return simulate_impl(net, cert, options);
}

SimulationResult simulate(const CompiledNetwork& net, const LyapunovCertificate& cert,
                          const SimulationOptions& options) {
  return simulate_impl(net, cert, options);
}

ExactDistribution exact_distribution(const CompiledNetwork& net, const LyapunovCertificate& cert,
                                     std::size_t initial_state, std::size_t initial_mode,
                                     std::size_t horizon, std::size_t mmax) {
  ClosedLoopModel model(net, cert, mmax);
  const std::size_t d = net.state_count();
  const bool markov = net.kind == NetworkClass::markovian;
  const std::size_t x0 = net.to_internal(initial_state);
  const std::size_t mode0 = markov ? initial_mode : 1;
  if (markov && (mode0 == 0 || mode0 > net.mode_count())) throw std::invalid_argument("initial mode out of range");

  const auto decide = [&](std::size_t x, std::size_t mode) -> const TriggerDecision& {
    const TriggerDecision& dec = model.decision(x, mode);
    if (dec.capped) {
      throw CapUnresolved("trigger decision at state " + std::to_string(net.to_user(x)) +
                          (markov ? " mode " + std::to_string(mode) : std::string()) +
                          " reached the horizon cap");
    }
    return dec;
  };

  ExactDistribution out;
  out.horizon = horizon;

  using Chain = std::map<AugmentedState, Rational>;
  const auto enter = [&](std::size_t x, std::size_t mode, const Rational& mass, Chain& chain) {
    const TriggerDecision& dec = decide(x, mode);
    chain[AugmentedState{x, mode, dec.chosen, dec.tau}] += mass;
  };
  Chain current;
  enter(x0, mode0, Rational(1), current);
  for (std::size_t t = 0;; ++t) {
    RationalVector dist(d, Rational(0));
    Rational ev = 0;
    std::vector<std::pair<AugmentedState, Rational>> snapshot;
    for (const auto& [a, mass] : current) {
      dist[net.to_user(a.state) - 1] += mass;
      ev += mass * model.value(a.state, a.mode);
      snapshot.emplace_back(a, mass);
    }
    out.augmented.push_back(std::move(snapshot));
    out.state_distribution.push_back(std::move(dist));
    out.expected_v.push_back(std::move(ev));
    if (t == horizon) break;
    Chain next;
    for (const auto& [a, mass] : current) {
      for (const auto& tr : model.transitions(a.state, a.mode, a.control)) {
        const Rational m = mass * tr.probability;
        if (!a.countdown) {
          next[AugmentedState{tr.state, tr.mode, a.control, std::nullopt}] += m;
        } else if (*a.countdown == 1) {
          enter(tr.state, tr.mode, m, next);
        } else {
          next[AugmentedState{tr.state, tr.mode, a.control, *a.countdown - 1}] += m;
        }
      }
    }
    current = std::move(next);
  }

  // Embedded chain over sampling instants: (state, mode, t_k) -> mass.
  using Node = std::pair<std::size_t, std::size_t>;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<std::map<Node, Rational>>> powers;
  const auto evolve = [&](std::size_t x, std::size_t mode, std::size_t u,
                          std::size_t steps) -> const std::map<Node, Rational>& {
    auto& seq = powers[{x, mode, u}];
    if (seq.empty()) seq.push_back({{Node{x, mode}, Rational(1)}});
    while (seq.size() <= steps) {
      std::map<Node, Rational> nxt;
      for (const auto& [node, mass] : seq.back())
        for (const auto& tr : model.transitions(node.first, node.second, u))
          nxt[Node{tr.state, tr.mode}] += mass * tr.probability;
      seq.push_back(std::move(nxt));
    }
    return seq[steps];
  };

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> instants;
  instants[{x0, mode0, 0}] = 1;
  Rational terminal = 0;
  while (!instants.empty()) {
    Rational w = terminal;
    Rational active = 0;
    for (const auto& [key, mass] : instants) {
      const auto& [x, mode, t] = key;
      const Rational& v = model.value(x, mode);
      w += mass * v;
      if (t < horizon && sgn(v) > 0) active += mass;
    }
    out.sampling_v.push_back(std::move(w));
    out.active_mass.push_back(std::move(active));

    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> next;
    for (const auto& [key, mass] : instants) {
      const auto& [x, mode, t] = key;
      const Rational& v = model.value(x, mode);
      if (t == horizon) {
        terminal += mass * v;
        continue;
      }
      const TriggerDecision& dec = decide(x, mode);
      if (x == d && !dec.tau && sgn(v) == 0) continue;
      if (dec.tau && t + *dec.tau <= horizon) {
        for (const auto& [node, p] : evolve(x, mode, dec.chosen, *dec.tau))
          next[{node.first, node.second, t + *dec.tau}] += mass * p;
      } else {
        for (const auto& [node, p] : evolve(x, mode, dec.chosen, horizon - t))
          terminal += mass * p * model.value(node.first, node.second);
      }
    }
    instants = std::move(next);
  }
  return out;
}

namespace {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(value);
}

}  // namespace

std::string trajectories_csv(std::span<const TrajectoryRecord> records) {
  std::ostringstream os;
  os << "t,run,state,mode,control,trigger,V\n";
  for (const auto& r : records) {
    for (const auto& s : r.steps) {
      os << s.t << ',' << r.run << ',' << s.state << ',';
      if (s.mode) os << *s.mode;
      os << ',' << s.control << ',' << (s.trigger ? 1 : 0) << ',' << format_double(to_double(s.v)) << '\n';
    }
  }
  return os.str();
}

std::string statistics_csv(const RunStatistics& stats) {
  std::ostringstream os;
  os << "t,frac_at_equilibrium,mean_V\n";
  for (std::size_t t = 0; t < stats.mean_v.size(); ++t) {
    os << t << ',' << format_double(stats.frac_at_equilibrium[t]) << ','
       << format_double(stats.mean_v[t]) << '\n';
  }
  return os.str();
}

std::string sampling_csv(const RunStatistics& stats) {
  std::ostringstream os;
  os << "k,mean_V,std_error\n";
  for (std::size_t k = 0; k < stats.sampling_mean.size(); ++k) {
    os << k << ',' << format_double(stats.sampling_mean[k]) << ','
       << format_double(stats.sampling_std_error[k]) << '\n';
  }
  return os.str();
}

std::string staircase_svg(std::span<const TrajectoryRecord> records, std::size_t state_count,
                          std::size_t horizon) {
  constexpr double kWidth = 640, kHeight = 360, kLeft = 50, kRight = 20, kTop = 20, kBottom = 40;
  const double span_t = std::max<std::size_t>(horizon, 1);
  const double span_s = std::max<std::size_t>(state_count, 2) - 1;
  const auto px = [&](double t) { return kLeft + (kWidth - kLeft - kRight) * t / span_t; };
  const auto py = [&](double s) { return kHeight - kBottom - (kHeight - kTop - kBottom) * (s - 1) / span_s; };
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << py(1) << "\" x2=\"" << px(span_t) << "\" y2=\"" << py(1)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << py(1) << "\" x2=\"" << kLeft << "\" y2=\""
     << py(static_cast<double>(state_count)) << "\" stroke=\"black\"/>\n";
  for (std::size_t s = 1; s <= state_count; ++s) {
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(static_cast<double>(s)) + 4
       << "\" text-anchor=\"end\">" << s << "</text>\n";
  }
  os << "<text x=\"" << px(span_t / 2) << "\" y=\"" << kHeight - 8 << "\" text-anchor=\"middle\">t</text>\n";
  os << "<text x=\"14\" y=\"" << kTop + 10 << "\">c(t)</text>\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    os << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << kColors[i % 8] << "\" points=\"";
    const auto& steps = records[i].steps;
    for (std::size_t j = 0; j < steps.size(); ++j) {
      const double y = py(static_cast<double>(steps[j].state));
      const double t = static_cast<double>(steps[j].t);
      if (j > 0) os << px(t) << ',' << py(static_cast<double>(steps[j - 1].state)) << ' ';
      os << px(t) << ',' << y << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bcn
