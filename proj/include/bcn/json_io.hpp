#pragma once

// JSON interchange between pipeline stages. Rationals are written as strings
// ("9/2", "83/10"); on input strings, integers and decimal numbers are
// accepted, decimals being read through their shortest round-trip text.

#include <string>

#include "json.hpp"

#include "bcn/lyapunov.hpp"
#include "bcn/network.hpp"
#include "bcn/self_trigger.hpp"
#include "bcn/simulation.hpp"
#include "bcn/stabilizer.hpp"

namespace bcn {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent JSON document.
class JsonFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Rational rational_from_json(const Json& j);
Json rational_to_json(const Rational& r);

Json network_to_json(const CompiledNetwork& net);
CompiledNetwork network_from_json(const Json& j);

/// {n, m, col_index}
Json gain_to_json(const LogicalMatrix& k, std::size_t n, std::size_t m);
LogicalMatrix gain_from_json(const Json& j);

/// {class, gains, min_slack, contraction_ratio}; gains is a flat list except
/// for markovian certificates, which hold one list per mode.
Json certificate_to_json(const LyapunovCertificate& cert);
LyapunovCertificate certificate_from_json(const Json& j);

Json report_to_json(const VerificationReport& report);
Json decision_to_json(const TriggerDecision& dec, const CompiledNetwork& net, std::size_t state,
                      std::size_t mode);
Json schedule_to_json(const ScheduleTable& table);
Json exact_to_json(const ExactDistribution& dist);

/// Parses text, mapping parser failures to JsonFormatError.
Json parse_json(const std::string& text);

}  // namespace bcn
