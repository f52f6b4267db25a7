#pragma once

#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace invgen {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) { return Rational(num, den); }

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const Rational& r) {
  auto d = denominator_of(r);
  if (d == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + d.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Decimal integer; leading zeros are not read as an octal prefix.
inline BigInt parse_integer(std::string s) {
  bool neg = !s.empty() && s[0] == '-';
  if (neg || (!s.empty() && s[0] == '+')) s.erase(0, 1);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("not an integer: " + s);
  auto nz = s.find_first_not_of('0');
  s = nz == std::string::npos ? "0" : s.substr(nz);
  BigInt v(s);
  return neg ? BigInt(-v) : v;
}

/// Accepts "a/b", integers, and finite decimals such as "0.05".
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rational(parse_integer(s.substr(0, slash)), den);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(parse_integer(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
  if (digits.empty() || digits == "-") digits += "0";
  return Rational(parse_integer(digits), den);
}

}  // namespace invgen
