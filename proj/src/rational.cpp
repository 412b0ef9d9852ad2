#include "replivol/rational.hpp"

#include "replivol/error.hpp"

#include <cctype>

namespace replivol {
namespace {

[[noreturn]] void parse_failure(std::string_view text, const char* why) {
  throw Error("ParseError", "cannot parse number '" + std::string(text) + "': " + why,
              ErrorClass::Input);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

BigInt parse_integer(std::string_view text, std::string_view whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) parse_failure(whole, "missing digits");
  BigInt value = 0;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) parse_failure(whole, "unexpected character");
    value = value * 10 + (c - '0');
  }
  return negative ? BigInt(-value) : value;
}

BigInt pow10(int n) {
  BigInt p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

}  // namespace

Rational parse_decimal(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  std::string_view int_part = text.substr(0, dot);
  std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) parse_failure(whole, "missing digits");
  if (int_part.empty()) int_part = "0";
  if (int_part.front() == '-' || int_part.front() == '+') parse_failure(whole, "misplaced sign");
  BigInt numerator = parse_integer(int_part, whole);
  if (!frac_part.empty()) {
    if (frac_part.front() == '-' || frac_part.front() == '+') parse_failure(whole, "misplaced sign");
    numerator = numerator * pow10(static_cast<int>(frac_part.size())) + parse_integer(frac_part, whole);
  }
  Rational r(numerator, pow10(static_cast<int>(frac_part.size())));
  return negative ? Rational(-r) : r;
}

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  BigInt p = parse_integer(trim(text.substr(0, slash)), whole);
  BigInt q = parse_integer(trim(text.substr(slash + 1)), whole);
  if (q == 0) parse_failure(whole, "zero denominator");
  return Rational(p, q);
}

std::string to_string(const Rational& value) {
  const BigInt& p = boost::multiprecision::numerator(value);
  const BigInt& q = boost::multiprecision::denominator(value);
  if (q == 1) return p.str();
  return p.str() + "/" + q.str();
}

std::string to_fixed(const Rational& value, int places) {
  if (places < 0) places = 0;
  const BigInt scale = pow10(places);
  BigInt p = boost::multiprecision::numerator(value);
  const BigInt q = boost::multiprecision::denominator(value);
  const bool negative = p < 0;
  if (negative) p = -p;
  // round half away from zero: floor((2 p scale + q) / (2 q))
  BigInt scaled = (2 * p * scale + q) / (2 * q);
  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= places) {
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  }
  std::string out;
  if (negative && scaled != 0) out.push_back('-');
  out.append(digits, 0, digits.size() - static_cast<std::size_t>(places));
  if (places > 0) {
    out.push_back('.');
    out.append(digits, digits.size() - static_cast<std::size_t>(places), std::string::npos);
  }
  return out;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace replivol
