#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace replivol {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", "-3" or a decimal literal such as "3.13223067".
/// Throws replivol::Error("ParseError") on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Parses a plain decimal literal ("12.5289226", "-0.5", "7") exactly.
Rational parse_decimal(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is one.
std::string to_string(const Rational& value);

/// Fixed-point rendering rounded half away from zero.
std::string to_fixed(const Rational& value, int places);

/// Closest double, for tolerance comparisons at output boundaries only.
double to_double(const Rational& value);

}  // namespace replivol
