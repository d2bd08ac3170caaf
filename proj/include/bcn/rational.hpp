#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bcn {

/// Exact arbitrary-precision rational. All algebra and certificate paths use it.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Raised when a quantity exceeds what the toolkit is configured to handle
/// (encoded-bit cap, dense-matrix size cap).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for shape or dimension mismatches between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "a/b", an integer, or a decimal literal ("0.3" -> 3/10) exactly.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

/// Nearest-below binary64 conversion (GMP truncation).
inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace bcn
