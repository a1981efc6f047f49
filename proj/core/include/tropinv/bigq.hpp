#pragma once
// Exact arbitrary-precision integers and rationals. No floating point is used
// anywhere in inference or verification.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <stdexcept>
#include <string>

namespace tropinv {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt numer(const BigRat& q) { return boost::multiprecision::numerator(q); }
inline BigInt denom(const BigRat& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const BigRat& q) { return denom(q) == 1; }

inline std::string to_string(const BigInt& n) { return n.str(); }

// Rationals print as "p/q", integers as plain "p".
inline std::string to_string(const BigRat& q) {
  if (is_integer(q)) return numer(q).str();
  return numer(q).str() + "/" + denom(q).str();
}

inline std::string abs_text(const BigInt& n) { return n < 0 ? BigInt(-n).str() : n.str(); }

// Parses "123", "-4", "7/2", "-3/5". Returns nullopt on malformed input.
std::optional<BigRat> parse_rat(const std::string& s);

// Parses a (possibly signed) decimal integer literal.
std::optional<BigInt> parse_int(const std::string& s);

BigInt gcd(const BigInt& a, const BigInt& b);
BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace tropinv
