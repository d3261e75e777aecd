#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asymptote {

// Exact rational with arbitrary-precision integer numerator/denominator.
// Expression templates are disabled so Rational behaves as a plain value type
// (usable as a map key, comparable without surprises).
using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

using BigInt = boost::multiprecision::cpp_int;

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Requires an integer value that fits in long long.
inline long long to_longlong(const Rational& r) {
  if (!is_integer(r)) throw std::invalid_argument("rational is not an integer");
  return numerator(r).convert_to<long long>();
}

inline BigInt floor_int(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

// Fractional part in [0, 1).
inline Rational frac_part(const Rational& r) { return r - Rational(floor_int(r)); }

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

// Parses "7/2", "-1/3", "4" (decimal integer strings, optional /denominator).
inline Rational rational_from_string(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty rational string");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
      throw std::invalid_argument("malformed rational string: " + std::string(s));
  }
  try {
    Rational r{std::string(s)};
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational string: " + std::string(s));
  }
}

}  // namespace asymptote
