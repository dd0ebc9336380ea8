#include "minflow/rational.hpp"

#include <cctype>

namespace minflow {

bool is_integer(const Rational& q) { return rat_den(q) == 1; }

Integer floor_rational(const Rational& q) {
  Integer n = rat_num(q);
  Integer d = rat_den(q);  // > 0 by normalization
  Integer quot = n / d;    // truncates toward zero
  if (n < 0 && quot * d != n) --quot;
  return quot;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  // trim
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;

  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    Integer d{std::string(den)};
    if (d == 0) return std::nullopt;
    value = Rational(Integer{std::string(num)}, d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer n = Integer{std::string(whole)} * scale + Integer{std::string(frac)};
    value = Rational(n, scale);
  } else {
    if (!all_digits(text)) return std::nullopt;
    value = Rational(Integer{std::string(text)});
  }
  return negative ? Rational(-value) : value;
}

std::string fraction_string(const Rational& q) {
  if (is_integer(q)) return rat_num(q).str();
  return rat_num(q).str() + "/" + rat_den(q).str();
}

bool overlap(const Interval& a, const Interval& b) {
  return a.lo <= b.hi && b.lo <= a.hi;
}

}  // namespace minflow
