#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace entromet {

// Exact scale/coordinate arithmetic. Relation membership is set-based, so
// scales must compare exactly; doubles are only used for entropy values.
using Rational = boost::rational<long long>;

inline constexpr long long kDefaultMaxDenominator = 1'000'000;

// Parses "3", "-2/7", "0.25", "1e-3", "6.3890560989306495". Decimal text is
// parsed exactly; if the reduced denominator exceeds max_den the value is
// replaced by its best rational approximation with denominator <= max_den
// (continued-fraction convergents, so the error is ~1/max_den^2).
Rational parse_rational(const std::string& text,
                        long long max_den = kDefaultMaxDenominator);

// Best rational approximation of x with denominator <= max_den.
Rational rational_from_double(double x,
                              long long max_den = kDefaultMaxDenominator);

double to_double(const Rational& r);

// Canonical text form: decimal when the denominator divides a power of ten
// ("1.4", "-0.25"), otherwise "num/den". Used for grid-state identifiers,
// so it must be deterministic.
std::string format_rational(const Rational& r);

std::size_t hash_rational(const Rational& r);

}  // namespace entromet
