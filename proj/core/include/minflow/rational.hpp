#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace minflow {

// Arbitrary-precision integers and rationals. Rationals are kept normalized
// (gcd 1, positive denominator) by the backing type.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer rat_num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer rat_den(const Rational& q) { return boost::multiprecision::denominator(q); }

bool is_integer(const Rational& q);
Integer floor_rational(const Rational& q);
double to_double(const Rational& q);

/// Parses "p/q", plain integers and exact decimal literals ("-1.25" -> -5/4).
std::optional<Rational> parse_rational(std::string_view text);

/// Renders as "p/q", or just "p" when the value is integral. Round-trips
/// through parse_rational losslessly.
std::string fraction_string(const Rational& q);

/// Closed interval with rational endpoints. Requires lo <= hi.
struct Interval {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& q) const { return lo <= q && q <= hi; }
  bool contains_zero() const { return contains(Rational(0)); }

  Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
  Interval scaled(const Rational& c) const {
    if (c >= 0) return {lo * c, hi * c};
    return {hi * c, lo * c};
  }
};

bool overlap(const Interval& a, const Interval& b);

}  // namespace minflow
