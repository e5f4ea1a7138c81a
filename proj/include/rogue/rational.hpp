#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace rogue {

/// Exact rational scalar. mpq_class keeps values in lowest terms with a
/// positive denominator after every operation.
using Rational = mpq_class;
using Integer = mpz_class;

/// Thrown for malformed input or an API contract violation by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when parameters hit a forbidden denominator or leave the
/// nonsingular regime without an explicit override.
class SingularParameters : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parses "p", "p/q", or a finite decimal such as "-0.125" or "2.5e-3"
/// into an exact rational.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when q == 1.
std::string to_string(const Rational& q);

/// Correctly rounded (round-to-nearest) conversion.
double to_double(const Rational& q);
long double to_long_double(const Rational& q);

Rational pow(const Rational& base, unsigned exponent);
Rational abs(const Rational& q);

}  // namespace rogue
