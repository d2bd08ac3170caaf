#include "bcn/json_io.hpp"

#include <charconv>

namespace bcn {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw JsonFormatError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw JsonFormatError(std::string("missing field '") + key + "'");
  return *it;
}

std::size_t index_from_json(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw JsonFormatError(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<std::size_t> indices_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw JsonFormatError(std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& e : j) out.push_back(index_from_json(e, what));
  return out;
}

RationalVector rationals_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw JsonFormatError(std::string(what) + " must be an array");
  RationalVector out;
  for (const auto& e : j) out.push_back(rational_from_json(e));
  return out;
}

Json rationals_to_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(rational_to_json(r));
  return out;
}

std::vector<std::string> names_from_json(const Json& j, const char* key) {
  std::vector<std::string> out;
  const auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw JsonFormatError(std::string(key) + " must be an array of strings");
  for (const auto& e : *it) {
    if (!e.is_string()) throw JsonFormatError(std::string(key) + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

LogicalMatrix logical_from_json(const Json& j, std::size_t rows, const char* what) {
  auto cols = indices_from_json(j, what);
  try {
    return LogicalMatrix(rows, std::move(cols));
  } catch (const std::exception& e) {
    throw JsonFormatError(std::string(what) + ": " + e.what());
  }
}

Json tau_to_json(const std::optional<std::size_t>& tau) {
  return tau ? Json(*tau) : Json(nullptr);
}

}  // namespace

Rational rational_from_json(const Json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return parse_rational(std::to_string(j.get<long long>()));
    if (j.is_number_unsigned()) return parse_rational(std::to_string(j.get<unsigned long long>()));
    if (j.is_number_float()) {
      char buf[64];
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, j.get<double>());
      if (ec == std::errc()) return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
    }
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(std::string("bad rational: ") + e.what());
  }
  throw JsonFormatError("expected a rational number, got " + j.dump());
}

Json rational_to_json(const Rational& r) { return to_string(r); }

Json network_to_json(const CompiledNetwork& net) {
  Json j;
  j["class"] = std::string(to_string(net.kind));
  j["n"] = net.n;
  j["m"] = net.m;
  j["nodes"] = net.node_names;
  j["inputs"] = net.input_names;
  Json modes = Json::array();
  for (std::size_t i = 0; i < net.modes.size(); ++i) {
    Json mode;
    mode["name"] = i < net.mode_names.size() ? net.mode_names[i] : "mode" + std::to_string(i + 1);
    mode["col_index"] = std::vector<std::size_t>(net.modes[i].col_index().begin(), net.modes[i].col_index().end());
    modes.push_back(std::move(mode));
  }
  j["modes"] = std::move(modes);
  if (net.kind == NetworkClass::probabilistic) j["probs"] = rationals_to_json(net.probs);
  if (net.kind == NetworkClass::markovian) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < net.pi.rows(); ++i) {
      RationalVector row(net.pi.cols());
      for (std::size_t k = 0; k < row.size(); ++k) row[k] = net.pi.at(i, k);
      rows.push_back(rationals_to_json(row));
    }
    j["pi"] = std::move(rows);
  }
  j["permutation"] = std::vector<std::size_t>(net.permutation.col_index().begin(), net.permutation.col_index().end());
  return j;
}

CompiledNetwork network_from_json(const Json& j) {
  CompiledNetwork net;
  try {
    net.kind = parse_network_class(field(j, "class").get<std::string>());
  } catch (const Json::exception&) {
    throw JsonFormatError("class must be a string");
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(e.what());
  }
  net.n = index_from_json(field(j, "n"), "n");
  net.m = index_from_json(field(j, "m"), "m");
  if (net.n == 0 || net.n + net.m > kMaxLogicalBits) {
    throw JsonFormatError("n must be positive and n + m at most " + std::to_string(kMaxLogicalBits));
  }
  net.node_names = names_from_json(j, "nodes");
  net.input_names = names_from_json(j, "inputs");
  const Json& modes = field(j, "modes");
  if (!modes.is_array() || modes.empty()) throw JsonFormatError("modes must be a non-empty array");
  for (const auto& mode : modes) {
    const Json& cols = mode.is_object() ? field(mode, "col_index") : mode;
    net.modes.push_back(logical_from_json(cols, net.state_count(), "col_index"));
    net.mode_names.push_back(mode.is_object() && mode.contains("name") && mode["name"].is_string()
                                 ? mode["name"].get<std::string>()
                                 : "mode" + std::to_string(net.modes.size()));
  }
  if (net.kind == NetworkClass::probabilistic) net.probs = rationals_from_json(field(j, "probs"), "probs");
  if (net.kind == NetworkClass::markovian) {
    const Json& rows = field(j, "pi");
    if (!rows.is_array()) throw JsonFormatError("pi must be an array of rows");
    const std::size_t r = rows.size();
    net.pi = RationalMatrix(r, r);
    for (std::size_t i = 0; i < r; ++i) {
      const RationalVector row = rationals_from_json(rows[i], "pi row");
      if (row.size() != r) throw JsonFormatError("pi must be square");
      for (std::size_t k = 0; k < r; ++k) net.pi.at(i, k) = row[k];
    }
  }
  if (j.contains("permutation")) {
    net.permutation = logical_from_json(j["permutation"], net.state_count(), "permutation");
  } else {
    net.permutation = LogicalMatrix::identity(net.state_count());
  }
  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(e.what());
  }
  return net;
}

Json gain_to_json(const LogicalMatrix& k, std::size_t n, std::size_t m) {
  Json j;
  j["n"] = n;
  j["m"] = m;
  j["col_index"] = std::vector<std::size_t>(k.col_index().begin(), k.col_index().end());
  return j;
}

LogicalMatrix gain_from_json(const Json& j) {
  const std::size_t n = index_from_json(field(j, "n"), "n");
  const std::size_t m = index_from_json(field(j, "m"), "m");
  if (n == 0 || n + m > kMaxLogicalBits) throw JsonFormatError("gain dimensions out of range");
  LogicalMatrix k = logical_from_json(field(j, "col_index"), std::size_t{1} << m, "col_index");
  if (k.cols() != (std::size_t{1} << n)) {
    throw JsonFormatError("gain has " + std::to_string(k.cols()) + " columns, expected 2^" + std::to_string(n));
  }
  return k;
}

Json certificate_to_json(const LyapunovCertificate& cert) {
  Json j;
  j["class"] = std::string(to_string(cert.kind));
  if (cert.kind == NetworkClass::markovian) {
    Json gains = Json::array();
    for (const auto& g : cert.gains) gains.push_back(rationals_to_json(g));
    j["gains"] = std::move(gains);
  } else {
    j["gains"] = rationals_to_json(cert.gain());
  }
  j["min_slack"] = rational_to_json(cert.min_slack);
  j["contraction_ratio"] = rational_to_json(cert.contraction_ratio);
  return j;
}

LyapunovCertificate certificate_from_json(const Json& j) {
  LyapunovCertificate cert;
  try {
    cert.kind = parse_network_class(field(j, "class").get<std::string>());
  } catch (const Json::exception&) {
    throw JsonFormatError("class must be a string");
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(e.what());
  }
  const Json& gains = field(j, "gains");
  if (!gains.is_array() || gains.empty()) throw JsonFormatError("gains must be a non-empty array");
  if (cert.kind == NetworkClass::markovian) {
    for (const auto& g : gains) cert.gains.push_back(rationals_from_json(g, "gains"));
  } else {
    cert.gains.push_back(rationals_from_json(gains, "gains"));
  }
  if (j.contains("min_slack")) cert.min_slack = rational_from_json(j["min_slack"]);
  if (j.contains("contraction_ratio")) cert.contraction_ratio = rational_from_json(j["contraction_ratio"]);
  return cert;
}

Json report_to_json(const VerificationReport& report) {
  Json j;
  j["valid"] = report.valid;
  j["min_slack"] = rational_to_json(report.min_slack);
  j["contraction_ratio"] = rational_to_json(report.contraction_ratio);
  j["slacks"] = rationals_to_json(report.slacks);
  j["violations"] = report.violations;
  return j;
}

Json decision_to_json(const TriggerDecision& dec, const CompiledNetwork& net, std::size_t state,
                      std::size_t mode) {
  Json j;
  j["state"] = net.to_user(state);
  if (net.kind == NetworkClass::markovian) j["mode"] = mode;
  j["tau"] = tau_to_json(dec.tau);
  j["control_set"] = dec.control_set;
  j["chosen"] = dec.chosen;
  j["capped"] = dec.capped;
  Json horizons = Json::array();
  for (std::size_t u = 0; u < dec.horizons.size(); ++u) {
    const auto& h = dec.horizons[u];
    Json e;
    e["control"] = u + 1;
    e["max_m"] = tau_to_json(h.max_m);
    e["absorbed_at"] = tau_to_json(h.absorbed_at);
    e["capped"] = h.capped;
    horizons.push_back(std::move(e));
  }
  j["horizons"] = std::move(horizons);
  return j;
}

Json schedule_to_json(const ScheduleTable& table) {
  Json j;
  j["class"] = std::string(to_string(table.kind));
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r;
    r["initial_state"] = row.initial_state;
    if (row.mode) r["mode"] = *row.mode;
    r["capped"] = row.capped;
    Json entries = Json::array();
    for (const auto& e : row.entries) {
      entries.push_back(Json{{"t", e.t}, {"state", e.state}, {"control", e.control}, {"tau", tau_to_json(e.tau)}});
    }
    r["entries"] = std::move(entries);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json exact_to_json(const ExactDistribution& dist) {
  Json j;
  j["horizon"] = dist.horizon;
  Json steps = Json::array();
  for (std::size_t t = 0; t < dist.state_distribution.size(); ++t) {
    steps.push_back(Json{{"t", t},
                         {"distribution", rationals_to_json(dist.state_distribution[t])},
                         {"expected_V", rational_to_json(dist.expected_v[t])}});
  }
  j["steps"] = std::move(steps);
  j["sampling_V"] = rationals_to_json(dist.sampling_v);
  return j;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw JsonFormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace bcn
