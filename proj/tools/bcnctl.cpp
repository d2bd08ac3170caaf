// bcnctl: compile, certify, schedule and simulate Boolean control networks.
//
// Exit codes: 0 success, 2 input or usage error, 3 not stabilizable or
// invalid certificate, 4 a trigger decision hit the horizon cap.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bcn/dsl.hpp"
#include "bcn/examples.hpp"
#include "bcn/json_io.hpp"
#include "bcn/lyapunov.hpp"
#include "bcn/report.hpp"
#include "bcn/self_trigger.hpp"
#include "bcn/simulation.hpp"
#include "bcn/stabilizer.hpp"

namespace {

using namespace bcn;

constexpr int kUsage = 2;
constexpr int kInfeasible = 3;
constexpr int kCapped = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string output;
  std::string format;
  std::uint64_t seed = 42;
  std::size_t runs = 500;
  std::size_t horizon = 50;
  std::optional<std::size_t> mmax;
  std::optional<std::size_t> state;
  std::optional<std::size_t> mode;
  bool trajectories = false;
  bool exact = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const Flags& flags, const std::string& text) {
  if (flags.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.output, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write '" + flags.output + "'");
}

bool looks_like_json(const std::string& path, const std::string& text) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bcn") == 0) return false;
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

CompiledNetwork load_network(const std::string& path) {
  const std::string text = read_file(path);
  if (looks_like_json(path, text)) return network_from_json(parse_json(text));
  try {
    return dsl::compile(dsl::parse(text));
  } catch (const dsl::ParseError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

LogicalMatrix load_gain(const std::string& path) { return gain_from_json(parse_json(read_file(path))); }

LyapunovCertificate load_certificate(const std::string& path) {
  return certificate_from_json(parse_json(read_file(path)));
}

std::size_t mmax_for(const Flags& flags, const CompiledNetwork& net) {
  return flags.mmax ? *flags.mmax : default_mmax(net.n);
}

std::string format_or(const Flags& flags, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string f = flags.format.empty() ? fallback : flags.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw UsageError("format '" + f + "' is not supported by this command");
}

std::vector<std::size_t> user_states(const Flags& flags, const CompiledNetwork& net) {
  if (flags.state) {
    if (*flags.state > net.state_count()) {
      throw UsageError("--state must be in [1, " + std::to_string(net.state_count()) + "]");
    }
    return {*flags.state};
  }
  std::vector<std::size_t> all(net.state_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i + 1;
  return all;
}

std::vector<std::size_t> user_modes(const Flags& flags, const CompiledNetwork& net, bool all_by_default) {
  if (net.kind != NetworkClass::markovian) return {1};
  if (flags.mode) {
    if (*flags.mode > net.mode_count()) {
      throw UsageError("--mode must be in [1, " + std::to_string(net.mode_count()) + "]");
    }
    return {*flags.mode};
  }
  if (!all_by_default) return {1};
  std::vector<std::size_t> all(net.mode_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i + 1;
  return all;
}

int emit_not_stabilized(const Flags& flags, const CompiledNetwork& net, const NotStabilized& ns) {
  Json j;
  j["status"] = "not_stabilized";
  j["reason"] = ns.reason;
  std::vector<std::size_t> witness = ns.witness;
  if (net.kind == NetworkClass::deterministic)
    for (auto& w : witness) w = net.to_user(w);
  j["witness"] = witness;
  write_output(flags, j.dump(2) + "\n");
  std::cerr << "not stabilized: " << ns.reason << "\n";
  return kInfeasible;
}

int cmd_compile(const Flags& flags, const std::string& input) {
  format_or(flags, "json", {"json"});
  const CompiledNetwork net = load_network(input);
  write_output(flags, network_to_json(net).dump(2) + "\n");
  return 0;
}

int cmd_certify(const Flags& flags, const std::string& net_path, const std::string& gain_path) {
  format_or(flags, "json", {"json"});
  const CompiledNetwork net = load_network(net_path);
  const FeedbackCheck check = verify_feedback(net, load_gain(gain_path));
  if (const auto* ns = std::get_if<NotStabilized>(&check.result)) return emit_not_stabilized(flags, net, *ns);
  write_output(flags, certificate_to_json(std::get<LyapunovCertificate>(check.result)).dump(2) + "\n");
  return 0;
}

int cmd_feedback(const Flags& flags, const std::string& net_path) {
  format_or(flags, "json", {"json"});
  const CompiledNetwork net = load_network(net_path);
  if (net.kind != NetworkClass::deterministic) {
    throw UsageError("feedback synthesis is available for deterministic networks only");
  }
  const auto result = synth_feedback(net.modes.front());
  if (const auto* ns = std::get_if<NotStabilizable>(&result)) {
    Json j;
    j["status"] = "not_stabilizable";
    j["reason"] = ns->reason;
    std::vector<std::size_t> unreached;
    for (std::size_t x : ns->unreached) unreached.push_back(net.to_user(x));
    j["unreached"] = unreached;
    write_output(flags, j.dump(2) + "\n");
    std::cerr << "not stabilizable: " << ns->reason << "\n";
    return kInfeasible;
  }
  write_output(flags, gain_to_json(std::get<FeedbackGain>(result).k, net.n, net.m).dump(2) + "\n");
  return 0;
}

int cmd_verify(const Flags& flags, const std::string& net_path, const std::string& gain_path,
               const std::string& cert_path) {
  format_or(flags, "json", {"json"});
  const CompiledNetwork net = load_network(net_path);
  const ClosedLoop loop = close_loop(net, load_gain(gain_path));
  const VerificationReport report = verify_certificate(load_certificate(cert_path), loop);
  write_output(flags, report_to_json(report).dump(2) + "\n");
  return report.valid ? 0 : kInfeasible;
}

int cmd_schedule(const Flags& flags, const std::string& net_path, const std::string& cert_path) {
  const std::string format = format_or(flags, "table", {"table", "json"});
  const CompiledNetwork net = load_network(net_path);
  const LyapunovCertificate cert = load_certificate(cert_path);
  const std::size_t mmax = mmax_for(flags, net);
  ScheduleTable table;
  table.kind = net.kind;
  for (std::size_t x : user_states(flags, net))
    for (std::size_t mode : user_modes(flags, net, true))
      table.rows.push_back(schedule_row(net, cert, x, mode, mmax));
  write_output(flags, format == "json" ? schedule_to_json(table).dump(2) + "\n"
                                       : render_schedule(table, net.state_count(), net.control_count()));
  for (const auto& row : table.rows)
    if (row.capped) return kCapped;
  return 0;
}

int cmd_trigger(const Flags& flags, const std::string& net_path, const std::string& cert_path) {
  format_or(flags, "json", {"json"});
  if (!flags.state) throw UsageError("trigger needs --state");
  const CompiledNetwork net = load_network(net_path);
  const LyapunovCertificate cert = load_certificate(cert_path);
  const std::size_t x = user_states(flags, net).front();
  const std::size_t mode = user_modes(flags, net, false).front();
  const std::size_t internal = net.to_internal(x);
  const TriggerDecision dec = trigger(net, cert, internal, mode, mmax_for(flags, net));
  write_output(flags, decision_to_json(dec, net, internal, mode).dump(2) + "\n");
  return dec.capped ? kCapped : 0;
}

int cmd_simulate(const Flags& flags, const std::string& net_path, const std::string& cert_path) {
  const std::string format = format_or(flags, "csv", {"csv", "svg", "json"});
  const CompiledNetwork net = load_network(net_path);
  const LyapunovCertificate cert = load_certificate(cert_path);
  const bool deterministic = net.kind == NetworkClass::deterministic;
  const auto states = user_states(flags, net);
  const std::size_t mode = user_modes(flags, net, false).front();

  if (flags.exact) {
    Json j = Json::array();
    for (std::size_t x : states) {
      Json e = exact_to_json(exact_distribution(net, cert, x, mode, flags.horizon, mmax_for(flags, net)));
      e["initial_state"] = x;
      j.push_back(std::move(e));
    }
    write_output(flags, j.dump(2) + "\n");
    return 0;
  }

  std::vector<TrajectoryRecord> records;
  std::vector<std::pair<std::size_t, RunStatistics>> stats;
  for (std::size_t i = 0; i < states.size(); ++i) {
    SimulationOptions opt;
    opt.initial_state = states[i];
    opt.initial_mode = mode;
    opt.horizon = flags.horizon;
    opt.seed = flags.seed;
    opt.runs = deterministic ? 1 : flags.runs;
    opt.first_run = i * opt.runs;
    opt.keep_trajectories = deterministic || flags.trajectories || format == "svg";
    opt.mmax = flags.mmax.value_or(0);
    SimulationResult result = simulate(net, cert, opt);
    if (format == "svg" && !deterministic && !flags.trajectories) result.trajectories.resize(1);
    for (auto& r : result.trajectories) records.push_back(std::move(r));
    stats.emplace_back(states[i], std::move(result.stats));
  }

  if (format == "svg") {
    write_output(flags, staircase_svg(records, net.state_count(), flags.horizon));
  } else if (format == "json") {
    Json j = Json::array();
    for (const auto& [x, st] : stats) {
      j.push_back(Json{{"initial_state", x},
                       {"runs", st.runs},
                       {"frac_at_equilibrium", st.frac_at_equilibrium},
                       {"mean_V", st.mean_v},
                       {"sampling_mean_V", st.sampling_mean},
                       {"sampling_std_error", st.sampling_std_error}});
    }
    write_output(flags, j.dump(2) + "\n");
  } else if (deterministic || flags.trajectories) {
    write_output(flags, trajectories_csv(records));
  } else {
    // Pooled over the requested initial states, equal runs each.
    RunStatistics pooled = stats.front().second;
    for (std::size_t i = 1; i < stats.size(); ++i) {
      for (std::size_t t = 0; t <= flags.horizon; ++t) {
        pooled.frac_at_equilibrium[t] += stats[i].second.frac_at_equilibrium[t];
        pooled.mean_v[t] += stats[i].second.mean_v[t];
      }
    }
    const double k = static_cast<double>(stats.size());
    for (std::size_t t = 0; t <= flags.horizon; ++t) {
      pooled.frac_at_equilibrium[t] /= k;
      pooled.mean_v[t] /= k;
    }
    write_output(flags, statistics_csv(pooled));
  }
  return 0;
}

int cmd_demo(const Flags& flags, const std::string& which) {
  std::ostringstream os;
  if (which == "example1") {
    const CompiledNetwork net = examples::example1_network();
    const LogicalMatrix k = examples::example1_gain();
    const ClosedLoop loop = close_loop(net, k);
    const LyapunovCertificate given = examples::example1_certificate();
    const VerificationReport report = verify_certificate(given, loop);
    os << "transition matrix: " << net.modes.front().to_string() << "\n";
    os << "feedback gain:     " << k.to_string() << "\n";
    os << "closed loop:       " << loop.deterministic.to_string() << "\n";
    os << "given lambda valid: " << (report.valid ? "yes" : "no") << ", min slack " << to_string(report.min_slack)
       << "\n";
    const SynthesisResult synthesized = synthesize(loop);
    if (const auto* cert = std::get_if<LyapunovCertificate>(&synthesized)) {
      os << "synthesized lambda:";
      for (const auto& g : cert->gain()) os << ' ' << to_string(g);
      os << "\n";
    }
    os << "\n" << render_schedule(schedule_table(net, given, default_mmax(net.n)), 8, 2);
  } else if (which == "example2") {
    const CompiledNetwork net = examples::example2_network();
    const ClosedLoop loop = close_loop(net, examples::example2_gain());
    const LyapunovCertificate given = examples::example2_certificate();
    const VerificationReport report = verify_certificate(given, loop);
    os << "given nu valid: " << (report.valid ? "yes" : "no") << ", min slack " << to_string(report.min_slack)
       << "\n";
    const SynthesisResult synthesized = synthesize(loop);
    if (const auto* cert = std::get_if<LyapunovCertificate>(&synthesized)) {
      os << "synthesized nu:";
      for (const auto& g : cert->gain()) os << ' ' << to_string(g);
      os << "\n";
    }
    os << "\n" << render_schedule(schedule_table(net, given, default_mmax(net.n)), 8, 2) << "\n";
    os << "initial state | runs | horizon | fraction at delta_8^8\n";
    for (std::size_t x = 1; x <= 8; ++x) {
      SimulationOptions opt;
      opt.initial_state = x;
      opt.horizon = flags.horizon;
      opt.seed = flags.seed;
      opt.runs = flags.runs;
      opt.first_run = (x - 1) * flags.runs;
      const auto result = simulate(net, given, opt);
      os << delta_label(8, x) << " | " << flags.runs << " | " << flags.horizon << " | "
         << result.stats.frac_at_equilibrium.back() << "\n";
    }
  } else {
    throw UsageError("unknown demo '" + which + "' (expected example1 or example2)");
  }
  write_output(flags, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean control network toolkit: certificates, self-triggered schedules, simulation"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("-o,--output", flags.output, "Write to this file instead of stdout");
  app.add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"json", "csv", "table", "svg"}));
  app.add_option("--seed", flags.seed, "Random seed")->capture_default_str();
  app.add_option("--runs", flags.runs, "Monte Carlo runs per initial state")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--horizon", flags.horizon, "Simulation horizon T")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--mmax", flags.mmax, "Search cap for stochastic trigger horizons (default 4*2^n or BCN_MMAX)")
      ->check(CLI::PositiveNumber);
  app.add_option("--state", flags.state, "Initial state index (1-based)")->check(CLI::PositiveNumber);
  app.add_option("--mode", flags.mode, "Initial mode index (markovian networks)")->check(CLI::PositiveNumber);

  std::string a, b, c;
  auto* compile = app.add_subcommand("compile", "Compile a .bcn rule file or network JSON to network JSON");
  compile->add_option("network", a, "Network file")->required();
  auto* certify = app.add_subcommand("certify", "Synthesize a Lyapunov certificate for a feedback gain");
  certify->add_option("network", a, "Network file")->required();
  certify->add_option("gain", b, "Gain JSON")->required();
  auto* feedback = app.add_subcommand("feedback", "Synthesize a stabilizing feedback (deterministic)");
  feedback->add_option("network", a, "Network file")->required();
  auto* verify = app.add_subcommand("verify", "Check a certificate against a closed loop");
  verify->add_option("network", a, "Network file")->required();
  verify->add_option("gain", b, "Gain JSON")->required();
  verify->add_option("certificate", c, "Certificate JSON")->required();
  auto* schedule = app.add_subcommand("schedule", "Self-triggered schedule table");
  schedule->add_option("network", a, "Network file")->required();
  schedule->add_option("certificate", b, "Certificate JSON")->required();
  auto* trig = app.add_subcommand("trigger", "Trigger decision at one sample");
  trig->add_option("network", a, "Network file")->required();
  trig->add_option("certificate", b, "Certificate JSON")->required();
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the self-triggered closed loop");
  simulate_cmd->add_option("network", a, "Network file")->required();
  simulate_cmd->add_option("certificate", b, "Certificate JSON")->required();
  simulate_cmd->add_flag("--trajectories", flags.trajectories, "Write per-run trajectories");
  simulate_cmd->add_flag("--exact", flags.exact, "Write the exact distribution instead of sampling");
  auto* demo = app.add_subcommand("demo", "Run a built-in example");
  demo->add_option("example", a, "example1 or example2")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*compile) return cmd_compile(flags, a);
    if (*certify) return cmd_certify(flags, a, b);
    if (*feedback) return cmd_feedback(flags, a);
    if (*verify) return cmd_verify(flags, a, b, c);
    if (*schedule) return cmd_schedule(flags, a, b);
    if (*trig) return cmd_trigger(flags, a, b);
    if (*simulate_cmd) return cmd_simulate(flags, a, b);
    if (*demo) return cmd_demo(flags, a);
  } catch (const CapUnresolved& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapped;
  } catch (const DeadEnd& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
