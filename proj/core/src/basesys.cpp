#include "minflow/basesys.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace minflow::basesys {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // rounding at the seam
  return f;
}

template <class Kind>
const Kind* as(const BaseSystem& s) {
  return std::get_if<Kind>(&s.kind);
}

[[noreturn]] void wrong_state(const BaseSystem& s) {
  throw std::invalid_argument("state does not match system '" + s.name + "'");
}

}  // namespace

double eval_trig(const std::vector<TrigTerm>& terms, double x1, double x2) {
  double acc = 0.0;
  for (const auto& t : terms) {
    double phase = kTwoPi * (t.k1 * x1 + t.k2 * x2);
    if (t.cos_coeff != 0) acc += to_double(t.cos_coeff) * std::cos(phase);
    if (t.sin_coeff != 0) acc += to_double(t.sin_coeff) * std::sin(phase);
  }
  return acc;
}

// --- odometer digit machinery -------------------------------------------------

int odometer_digit_bound(const Odometer& odo, std::size_t index) {
  return odo.digits[index % odo.digits.size()];
}

int odometer_group_depth(const Odometer& odo) {
  return odo.group_depth > 0 ? odo.group_depth : static_cast<int>(odo.digits.size());
}

Integer odometer_level_product(const Odometer& odo, int depth) {
  Integer p = 1;
  for (int i = 0; i < depth; ++i) p *= odometer_digit_bound(odo, static_cast<std::size_t>(i));
  return p;
}

int odometer_digit(const Odometer& odo, const OdometerState& x, std::size_t index) {
  if (index < x.window.size()) return x.window[index];
  return x.tail == OdoTail::Zeros ? 0 : odometer_digit_bound(odo, index) - 1;
}

Integer odometer_counter(const Odometer& odo, const OdometerState& x, int depth) {
  Integer acc = 0;
  Integer weight = 1;
  for (int i = 0; i < depth; ++i) {
    acc += weight * odometer_digit(odo, x, static_cast<std::size_t>(i));
    weight *= odometer_digit_bound(odo, static_cast<std::size_t>(i));
  }
  return acc;
}

bool operator==(const OdometerState& a, const OdometerState& b) {
  return a.tail == b.tail && a.window == b.window;
}

namespace {

// keep states canonical: no trailing digits equal to the tail value
void trim(const Odometer& odo, OdometerState& x) {
  while (!x.window.empty()) {
    std::size_t i = x.window.size() - 1;
    int tail_digit = x.tail == OdoTail::Zeros ? 0 : odometer_digit_bound(odo, i) - 1;
    if (x.window.back() != tail_digit) break;
    x.window.pop_back();
  }
}

void odo_increment(const Odometer& odo, OdometerState& x) {
  std::size_t i = 0;
  for (;;) {
    if (i == x.window.size()) {
      if (x.tail == OdoTail::Zeros) {
        x.window.push_back(1);
      } else {
        // carry runs through the all-maxes tail and vanishes at infinity
        x.tail = OdoTail::Zeros;
      }
      break;
    }
    int bound = odometer_digit_bound(odo, i);
    if (x.window[i] + 1 < bound) {
      ++x.window[i];
      break;
    }
    x.window[i] = 0;
    ++i;
  }
  trim(odo, x);
}

void odo_decrement(const Odometer& odo, OdometerState& x) {
  std::size_t i = 0;
  for (;;) {
    if (i == x.window.size()) {
      if (x.tail == OdoTail::Maxes) {
        x.window.push_back(odometer_digit_bound(odo, i) - 2);
      } else {
        // borrow runs through the all-zeros tail
        x.tail = OdoTail::Maxes;
      }
      break;
    }
    if (x.window[i] > 0) {
      --x.window[i];
      break;
    }
    x.window[i] = odometer_digit_bound(odo, i) - 1;
    ++i;
  }
  trim(odo, x);
}

// Furstenberg maps: forward = (x1 + theta, x2 + twist*x1 + xi(x1)); the system
// is the inverse of the forward map.
TorusState furstenberg_forward(const Furstenberg& f, double theta, TorusState p) {
  double y1 = frac(p.x1 + theta);
  double y2 = frac(p.x2 + f.twist * p.x1 + eval_trig(f.xi, p.x1));
  return {y1, y2};
}

TorusState furstenberg_inverse(const Furstenberg& f, double theta, TorusState p) {
  double y1 = frac(p.x1 - theta);
  double y2 = frac(p.x2 - f.twist * y1 - eval_trig(f.xi, y1));
  return {y1, y2};
}

}  // namespace

// --- states and stepping --------------------------------------------------------

BaseState initial_state(const BaseSystem& system) {
  if (as<PointSystem>(system)) return PointState{};
  if (as<CircleRotation>(system)) return CircleState{0.0};
  if (as<TorusTranslation>(system) || as<Furstenberg>(system)) return TorusState{0.0, 0.0};
  if (as<Odometer>(system)) return OdometerState{};
  if (as<Denjoy>(system)) return DenjoyState{0.0, Side::None};
  throw UnsupportedOperation("declared system '" + system.name + "' carries no concrete states");
}

BaseState step(const BaseSystem& system, const BaseState& x, long long n) {
  if (as<PointSystem>(system)) {
    if (!std::holds_alternative<PointState>(x)) wrong_state(system);
    return x;
  }
  if (const auto* rot = as<CircleRotation>(system)) {
    const auto* st = std::get_if<CircleState>(&x);
    if (!st) wrong_state(system);
    return CircleState{frac(st->x + static_cast<double>(n) * rot->angle.numeric())};
  }
  if (const auto* tor = as<TorusTranslation>(system)) {
    const auto* st = std::get_if<TorusState>(&x);
    if (!st) wrong_state(system);
    double nn = static_cast<double>(n);
    return TorusState{frac(st->x1 + nn * tor->s1.numeric()), frac(st->x2 + nn * tor->s2.numeric())};
  }
  if (const auto* odo = as<Odometer>(system)) {
    const auto* st = std::get_if<OdometerState>(&x);
    if (!st) wrong_state(system);
    OdometerState out = *st;
    for (long long i = 0; i < n; ++i) odo_increment(*odo, out);
    for (long long i = 0; i > n; --i) odo_decrement(*odo, out);
    return out;
  }
  if (const auto* den = as<Denjoy>(system)) {
    const auto* st = std::get_if<DenjoyState>(&x);
    if (!st) wrong_state(system);
    return DenjoyState{frac(st->x + static_cast<double>(n) * den->rotation.numeric()), st->side};
  }
  if (const auto* fur = as<Furstenberg>(system)) {
    const auto* st = std::get_if<TorusState>(&x);
    if (!st) wrong_state(system);
    double theta = fur->theta.numeric();
    TorusState out = *st;
    for (long long i = 0; i < n; ++i) out = furstenberg_inverse(*fur, theta, out);
    for (long long i = 0; i > n; --i) out = furstenberg_forward(*fur, theta, out);
    return out;
  }
  throw UnsupportedOperation("declared system '" + system.name + "' carries no concrete dynamics");
}

double denjoy_factor(const DenjoyState& x) { return x.x; }

// --- spectral catalog -----------------------------------------------------------

namespace {
ExactReal one_of(const BaseSystem& s) { return ExactReal::rational(s.basis, 1); }
}  // namespace

GroupResult eigen_group_lift(const BaseSystem& system) {
  if (as<PointSystem>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system)}), "integers"};
  if (const auto* rot = as<CircleRotation>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system), rot->angle}),
            "Z + sZ for the rotation angle s"};
  if (const auto* tor = as<TorusTranslation>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system), tor->s1, tor->s2}),
            "Z + s1 Z + s2 Z"};
  if (const auto* odo = as<Odometer>(system)) {
    int depth = odometer_group_depth(*odo);
    Rational gen{Integer(1), odometer_level_product(*odo, depth)};
    return {FgSubgroup::generated_by(system.basis, {ExactReal::rational(system.basis, gen)}),
            "rationals with denominator dividing the level-" + std::to_string(depth) +
                " product (finite truncation of the full dyadic-style group)"};
  }
  if (const auto* den = as<Denjoy>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system), den->rotation}),
            "Z + sZ via the almost one-to-one factor onto the rotation"};
  if (const auto* fur = as<Furstenberg>(system)) {
    if (fur->declared_spectra) return {fur->declared_spectra->eigen_lift, "declared"};
    return {std::nullopt,
            "Furstenberg system '" + system.name +
                "' has no catalog eigenvalue data; declare its spectra to proceed"};
  }
  if (const auto* dec = std::get_if<DeclaredSystem>(&system.kind))
    return {dec->eigen_lift, "declared"};
  return {std::nullopt, "unknown system kind"};
}

GroupResult trace_range(const BaseSystem& system) {
  if (as<PointSystem>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system)}), "integers"};
  if (const auto* rot = as<CircleRotation>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system), rot->angle}),
            "Z + sZ (trace is an isomorphism on K0 for irrational rotations)"};
  if (const auto* tor = as<TorusTranslation>(system))
    return {FgSubgroup::generated_by(system.basis, {one_of(system), tor->s1, tor->s2}),
            "Z + s1 Z + s2 Z (minimal group rotation)"};
  if (as<Odometer>(system)) return eigen_group_lift(system);
  if (const auto* den = as<Denjoy>(system)) {
    std::vector<ExactReal> gens{one_of(system), den->rotation};
    for (const auto& m : den->markers) gens.push_back(m);
    return {FgSubgroup::generated_by(system.basis, std::move(gens)),
            "Z + sZ + marker offsets (gap-label group of the Denjoy system)"};
  }
  if (const auto* fur = as<Furstenberg>(system)) {
    if (fur->declared_spectra) return {fur->declared_spectra->trace_range, "declared"};
    return {std::nullopt,
            "Furstenberg system '" + system.name +
                "' has no catalog trace data; declare its spectra to proceed"};
  }
  if (const auto* dec = std::get_if<DeclaredSystem>(&system.kind))
    return {dec->trace_range, "declared"};
  return {std::nullopt, "unknown system kind"};
}

BaseMinimality is_minimal_base(const BaseSystem& system) {
  if (as<PointSystem>(system)) return {true, "single point"};
  if (as<CircleRotation>(system)) return {true, "irrational rotation (declared)"};
  if (as<Odometer>(system)) return {true, "odometers are minimal"};
  if (as<Denjoy>(system)) return {true, "Denjoy systems are minimal Cantor systems"};
  if (as<Furstenberg>(system)) return {true, "Furstenberg transformations are minimal"};
  if (const auto* dec = std::get_if<DeclaredSystem>(&system.kind))
    return {dec->minimal, "asserted by declaration"};

  const auto* tor = as<TorusTranslation>(system);
  auto one = one_of(system);
  auto span = qlinear::QSubspace::span_of(system.basis, {one, tor->s1, tor->s2});
  if (span.rank() == 3)
    return {true, "1, s1, s2 are Q-linearly independent (conditional on declared independence)"};
  BaseMinimality out{false, ""};
  auto span1 = qlinear::QSubspace::span_of(system.basis, {one, tor->s1});
  if (auto c = span1.membership(tor->s2)) {
    out.note = "s2 lies in the Q-span of {1, s1}";
    out.dependence = *c;
  } else if (auto c2 = qlinear::QSubspace::span_of(system.basis, {one, tor->s2})
                           .membership(tor->s1)) {
    out.note = "s1 lies in the Q-span of {1, s2}";
    out.dependence = *c2;
  } else {
    out.note = "1, s1, s2 are Q-linearly dependent";
  }
  return out;
}

std::vector<std::string> measure_ids(const BaseSystem& system) {
  if (as<PointSystem>(system)) return {"point"};
  if (as<CircleRotation>(system)) return {"lebesgue"};
  if (as<TorusTranslation>(system)) return {"haar"};
  if (as<Odometer>(system)) return {"product"};
  if (as<Denjoy>(system)) return {"unique"};
  if (const auto* fur = as<Furstenberg>(system)) {
    if (fur->declared_spectra && !fur->declared_spectra->measures.empty()) {
      std::vector<std::string> ids;
      for (const auto& m : fur->declared_spectra->measures) ids.push_back(m.id);
      return ids;
    }
    return {"haar"};
  }
  if (const auto* dec = std::get_if<DeclaredSystem>(&system.kind)) {
    std::vector<std::string> ids;
    for (const auto& m : dec->measures) ids.push_back(m.id);
    return ids;
  }
  return {};
}

// --- characters -------------------------------------------------------------------

std::complex<double> BaseCharacter::eval(const BaseSystem& system, const BaseState& x) const {
  switch (kind) {
    case Kind::Trivial:
      return {1.0, 0.0};
    case Kind::Circle: {
      double coord = 0.0;
      if (const auto* c = std::get_if<CircleState>(&x))
        coord = c->x;
      else if (const auto* d = std::get_if<DenjoyState>(&x))
        coord = denjoy_factor(*d);
      else
        wrong_state(system);
      return std::polar(1.0, kTwoPi * k1 * coord);
    }
    case Kind::Torus: {
      const auto* t = std::get_if<TorusState>(&x);
      if (!t) wrong_state(system);
      return std::polar(1.0, kTwoPi * (k1 * t->x1 + k2 * t->x2));
    }
    case Kind::OdometerCylinder: {
      const auto* odo = std::get_if<Odometer>(&system.kind);
      const auto* st = std::get_if<OdometerState>(&x);
      if (!odo || !st) wrong_state(system);
      Rational turns = phase_per_count * Rational(odometer_counter(*odo, *st, depth));
      turns -= Rational(floor_rational(turns));  // reduce mod 1 exactly
      return std::polar(1.0, kTwoPi * to_double(turns));
    }
  }
  return {1.0, 0.0};
}

std::optional<BaseCharacter> base_character_for(const BaseSystem& system,
                                                const ExactReal& lambda) {
  if (as<PointSystem>(system)) {
    if (lambda.is_rational() && is_integer(lambda.rational_part()))
      return BaseCharacter{.kind = BaseCharacter::Kind::Trivial, .label = "trivial"};
    return std::nullopt;
  }
  if (const auto* rot = as<CircleRotation>(system)) {
    auto lift = FgSubgroup::generated_by(system.basis, {one_of(system), rot->angle});
    auto cert = lift.membership(lambda);
    if (!cert) return std::nullopt;
    int b = static_cast<int>((*cert)[1]);
    return BaseCharacter{.kind = BaseCharacter::Kind::Circle,
                         .k1 = b,
                         .label = "circle character " + std::to_string(b)};
  }
  if (const auto* den = as<Denjoy>(system)) {
    auto lift = FgSubgroup::generated_by(system.basis, {one_of(system), den->rotation});
    auto cert = lift.membership(lambda);
    if (!cert) return std::nullopt;
    int b = static_cast<int>((*cert)[1]);
    return BaseCharacter{.kind = BaseCharacter::Kind::Circle,
                         .k1 = b,
                         .label = "factor character " + std::to_string(b)};
  }
  if (const auto* tor = as<TorusTranslation>(system)) {
    auto lift = FgSubgroup::generated_by(system.basis, {one_of(system), tor->s1, tor->s2});
    auto cert = lift.membership(lambda);
    if (!cert) return std::nullopt;
    return BaseCharacter{.kind = BaseCharacter::Kind::Torus,
                         .k1 = static_cast<int>((*cert)[1]),
                         .k2 = static_cast<int>((*cert)[2]),
                         .label = "torus character"};
  }
  if (const auto* odo = as<Odometer>(system)) {
    if (!lambda.is_rational()) return std::nullopt;
    int depth = odometer_group_depth(*odo);
    Rational q = lambda.rational_part();
    Rational scaled = q * Rational(odometer_level_product(*odo, depth));
    if (!is_integer(scaled)) return std::nullopt;
    return BaseCharacter{.kind = BaseCharacter::Kind::OdometerCylinder,
                         .phase_per_count = q,
                         .depth = depth,
                         .label = "cylinder character " + fraction_string(q)};
  }
  return std::nullopt;
}

}  // namespace minflow::basesys
