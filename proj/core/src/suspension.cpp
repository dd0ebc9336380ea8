#include "minflow/suspension.hpp"

#include <cmath>

namespace minflow::suspension {

namespace {

constexpr long long kWrapBudget = 4'000'000;

}  // namespace

const char* admissible_ceiling_classes(const BaseSystem& system) {
  if (std::get_if<basesys::Odometer>(&system.kind))
    return "constant or cylinder-locally-constant ceilings (odometers)";
  if (std::get_if<basesys::DeclaredSystem>(&system.kind))
    return "constant or declared-integral ceilings";
  if (std::get_if<basesys::PointSystem>(&system.kind)) return "constant ceilings";
  return "constant, trig-polynomial or cohomologous-to-constant ceilings";
}

bool CeilingFunction::is_constant_one() const {
  const auto* c = std::get_if<Constant>(&form_);
  return c && c->value.is_rational() && c->value.rational_part() == 1;
}

double CeilingFunction::eval(const BaseSystem& system, const BaseState& x) const {
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value.numeric();
  if (const auto* tp = std::get_if<TrigPoly>(&form_)) {
    double x1 = 0.0, x2 = 0.0;
    if (const auto* cs = std::get_if<basesys::CircleState>(&x)) {
      x1 = cs->x;
    } else if (const auto* ds = std::get_if<basesys::DenjoyState>(&x)) {
      x1 = basesys::denjoy_factor(*ds);
    } else if (const auto* ts = std::get_if<basesys::TorusState>(&x)) {
      x1 = ts->x1;
      x2 = ts->x2;
    } else {
      throw AdmissibilityError("trig-polynomial ceiling needs a circle or torus state; '" +
                               system.name + "' admits " + admissible_ceiling_classes(system));
    }
    return to_double(tp->constant) + basesys::eval_trig(tp->terms, x1, x2);
  }
  if (const auto* cv = std::get_if<CylinderValues>(&form_)) {
    const auto* odo = std::get_if<basesys::Odometer>(&system.kind);
    const auto* st = std::get_if<basesys::OdometerState>(&x);
    if (!odo || !st)
      throw AdmissibilityError("cylinder ceiling needs an odometer base; '" + system.name +
                               "' admits " + admissible_ceiling_classes(system));
    Integer idx = basesys::odometer_counter(*odo, *st, cv->depth);
    return to_double(cv->values.at(idx.convert_to<std::size_t>()));
  }
  if (const auto* co = std::get_if<CohomologousToConstant>(&form_)) {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    BaseState next = basesys::step(system, x, 1);
    auto coords = [](const BaseState& s, double& a, double& b) {
      if (const auto* cs = std::get_if<basesys::CircleState>(&s)) {
        a = cs->x;
      } else if (const auto* ds = std::get_if<basesys::DenjoyState>(&s)) {
        a = basesys::denjoy_factor(*ds);
      } else if (const auto* ts = std::get_if<basesys::TorusState>(&s)) {
        a = ts->x1;
        b = ts->x2;
      } else {
        return false;
      }
      return true;
    };
    if (!coords(x, x1, x2) || !coords(next, y1, y2))
      throw AdmissibilityError("cohomologous ceiling needs a circle or torus base; '" +
                               system.name + "' admits " + admissible_ceiling_classes(system));
    return co->constant.numeric() + basesys::eval_trig(co->transfer, y1, y2) -
           basesys::eval_trig(co->transfer, x1, x2);
  }
  throw AdmissibilityError("ceiling '" + std::get<DeclaredFn>(form_).fn_id +
                           "' has no pointwise evaluator (declared integrals only)");
}

void CeilingFunction::validate_positive(const BaseSystem& system) const {
  if (const auto* c = std::get_if<Constant>(&form_)) {
    if (c->value.sign() <= 0)
      throw AdmissibilityError("constant ceiling must be strictly positive");
    return;
  }
  if (const auto* tp = std::get_if<TrigPoly>(&form_)) {
    Rational osc{0};
    for (const auto& t : tp->terms)
      osc += boost::multiprecision::abs(t.cos_coeff) + boost::multiprecision::abs(t.sin_coeff);
    if (!(tp->constant > osc))
      throw AdmissibilityError(
          "trig-polynomial ceiling: constant term must dominate the oscillatory mass (" +
          fraction_string(tp->constant) + " <= " + fraction_string(osc) + ")");
    return;
  }
  if (const auto* cv = std::get_if<CylinderValues>(&form_)) {
    const auto* odo = std::get_if<basesys::Odometer>(&system.kind);
    if (!odo) throw AdmissibilityError("cylinder ceiling needs an odometer base");
    Integer want = basesys::odometer_level_product(*odo, cv->depth);
    if (Integer(cv->values.size()) != want)
      throw AdmissibilityError("cylinder ceiling needs one value per depth-" +
                               std::to_string(cv->depth) + " cylinder (" + want.str() + ")");
    for (const auto& v : cv->values)
      if (v <= 0) throw AdmissibilityError("cylinder ceiling values must be strictly positive");
    return;
  }
  if (const auto* co = std::get_if<CohomologousToConstant>(&form_)) {
    if (co->constant.sign() <= 0)
      throw AdmissibilityError("cohomologous ceiling: constant must be strictly positive");
    // positivity of c + g(Sx) - g(x) is the declarer's responsibility; sample it
    BaseState x = basesys::initial_state(system);
    for (int i = 0; i < 1024; ++i) {
      if (eval(system, x) <= 0.0)
        throw AdmissibilityError("cohomologous ceiling dips below zero along the sampled orbit");
      x = basesys::step(system, x, 1);
    }
    return;
  }
  const auto& fn = std::get<DeclaredFn>(form_);
  const auto* dec = std::get_if<basesys::DeclaredSystem>(&system.kind);
  if (!dec) throw AdmissibilityError("declared-integral ceiling needs a declared system");
  for (const auto& mu : dec->measures) {
    bool found = false;
    for (const auto& [id, value] : mu.values) {
      if (id != fn.fn_id) continue;
      found = true;
      if (value.sign() <= 0)
        throw AdmissibilityError("declared ceiling '" + fn.fn_id +
                                 "' must have strictly positive declared integrals");
    }
    if (!found)
      throw AdmissibilityError("declared ceiling '" + fn.fn_id + "' lacks a value for measure '" +
                               mu.id + "'");
  }
}

double cocycle_alpha(const SuspensionFlow& flow, const BaseState& x, long long n) {
  if (n == 0) return 0.0;
  double acc = 0.0;
  if (n > 0) {
    BaseState cur = x;
    for (long long i = 0; i < n; ++i) {
      acc += flow.ceiling.eval(flow.base, cur);
      cur = basesys::step(flow.base, cur, 1);
    }
    return acc;
  }
  BaseState cur = x;
  for (long long i = 0; i < -n; ++i) {
    cur = basesys::step(flow.base, cur, -1);
    acc -= flow.ceiling.eval(flow.base, cur);
  }
  return acc;
}

std::optional<ExactReal> cocycle_alpha_exact(const SuspensionFlow& flow, const BaseState& x,
                                             long long n) {
  if (const auto* c = std::get_if<CeilingFunction::Constant>(&flow.ceiling.form()))
    return qlinear::scale(c->value, Rational(n));
  const auto* cv = std::get_if<CeilingFunction::CylinderValues>(&flow.ceiling.form());
  const auto* odo = std::get_if<basesys::Odometer>(&flow.base.kind);
  const auto* st = std::get_if<basesys::OdometerState>(&x);
  if (!cv || !odo || !st) return std::nullopt;
  Rational acc{0};
  basesys::OdometerState cur = *st;
  auto value_at = [&](const basesys::OdometerState& s) {
    Integer idx = basesys::odometer_counter(*odo, s, cv->depth);
    return cv->values.at(idx.convert_to<std::size_t>());
  };
  BaseSystem sys = flow.base;
  for (long long i = 0; i < n; ++i) {
    acc += value_at(cur);
    cur = std::get<basesys::OdometerState>(basesys::step(sys, cur, 1));
  }
  for (long long i = 0; i > n; --i) {
    cur = std::get<basesys::OdometerState>(basesys::step(sys, cur, -1));
    acc -= value_at(cur);
  }
  return ExactReal::rational(flow.base.basis, acc);
}

SuspensionPoint flow_by(const SuspensionFlow& flow, const SuspensionPoint& p, double t) {
  double u = p.height + t;

  if (const auto* c = std::get_if<CeilingFunction::Constant>(&flow.ceiling.form())) {
    double cv = c->value.numeric();
    long long n = static_cast<long long>(std::floor(u / cv));
    double h = u - static_cast<double>(n) * cv;
    // guard the float seam so the invariant 0 <= h < c holds exactly
    while (h < 0.0) {
      --n;
      h += cv;
    }
    while (h >= cv) {
      ++n;
      h -= cv;
    }
    return {basesys::step(flow.base, p.base, n), h};
  }

  if (u >= 0.0) {
    BaseState cur = p.base;
    long long n = 0;
    double alpha = 0.0;
    for (;;) {
      double fx = flow.ceiling.eval(flow.base, cur);
      if (alpha + fx > u) return {cur, u - alpha};
      alpha += fx;
      cur = basesys::step(flow.base, cur, 1);
      if (++n > kWrapBudget)
        throw FlowBudgetError("wrap search exceeded its forward budget", n);
    }
  }
  BaseState cur = p.base;
  long long n = 0;
  double alpha = 0.0;
  for (;;) {
    cur = basesys::step(flow.base, cur, -1);
    alpha -= flow.ceiling.eval(flow.base, cur);
    --n;
    if (alpha <= u) return {cur, u - alpha};
    if (-n > kWrapBudget) throw FlowBudgetError("wrap search exceeded its backward budget", n);
  }
}

SuspensionPoint normalize(const SuspensionFlow& flow, BaseState base, double height) {
  return flow_by(flow, SuspensionPoint{std::move(base), 0.0}, height);
}

std::pair<double, double> torus_chart(const SuspensionFlow& flow, const SuspensionPoint& p) {
  const auto* rot = std::get_if<basesys::CircleRotation>(&flow.base.kind);
  if (!rot || !flow.ceiling.is_constant_one())
    throw AdmissibilityError(
        "torus chart requires the standard suspension of a circle rotation");
  const auto* st = std::get_if<basesys::CircleState>(&p.base);
  if (!st) throw AdmissibilityError("torus chart: point does not lie over the circle base");
  double s = rot->angle.numeric();
  auto fracd = [](double v) {
    double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
  };
  return {fracd(st->x + s * p.height), fracd(p.height)};
}

}  // namespace minflow::suspension

namespace minflow::basesys {

ExactReal integrate(const BaseSystem& system, const std::string& measure_id,
                    const suspension::CeilingFunction& f) {
  auto ids = measure_ids(system);
  if (std::find(ids.begin(), ids.end(), measure_id) == ids.end())
    throw suspension::AdmissibilityError("system '" + system.name + "' has no measure '" +
                                         measure_id + "'");

  using CF = suspension::CeilingFunction;
  if (const auto* c = std::get_if<CF::Constant>(&f.form())) return c->value;

  if (const auto* tp = std::get_if<CF::TrigPoly>(&f.form())) {
    bool circle_like = std::get_if<CircleRotation>(&system.kind) ||
                       std::get_if<TorusTranslation>(&system.kind) ||
                       std::get_if<Denjoy>(&system.kind) || std::get_if<Furstenberg>(&system.kind);
    if (!circle_like)
      throw suspension::AdmissibilityError("'" + system.name + "' admits " +
                                           suspension::admissible_ceiling_classes(system));
    // oscillatory terms have zero mean against the invariant measure
    return ExactReal::rational(system.basis, tp->constant);
  }

  if (const auto* cv = std::get_if<CF::CylinderValues>(&f.form())) {
    const auto* odo = std::get_if<Odometer>(&system.kind);
    if (!odo)
      throw suspension::AdmissibilityError("cylinder ceilings need an odometer base; '" +
                                           system.name + "' admits " +
                                           suspension::admissible_ceiling_classes(system));
    Integer count = odometer_level_product(*odo, cv->depth);
    if (Integer(cv->values.size()) != count)
      throw suspension::AdmissibilityError("cylinder ceiling has the wrong number of values");
    Rational acc{0};
    for (const auto& v : cv->values) acc += v;
    return ExactReal::rational(system.basis, acc / Rational(count));
  }

  if (const auto* co = std::get_if<CF::CohomologousToConstant>(&f.form()))
    return co->constant;  // the coboundary integrates to zero

  const auto& fn = std::get<CF::DeclaredFn>(f.form());
  const DeclaredSystem* dec = std::get_if<DeclaredSystem>(&system.kind);
  if (!dec) {
    const auto* fur = std::get_if<Furstenberg>(&system.kind);
    if (fur && fur->declared_spectra) dec = &*fur->declared_spectra;
  }
  if (!dec)
    throw suspension::AdmissibilityError(
        "declared-integral ceilings integrate over declared systems only");
  for (const auto& mu : dec->measures) {
    if (mu.id != measure_id) continue;
    for (const auto& [id, value] : mu.values)
      if (id == fn.fn_id) return value;
    throw suspension::AdmissibilityError("measure '" + measure_id + "' declares no integral for '" +
                                         fn.fn_id + "'");
  }
  throw suspension::AdmissibilityError("no declared measure '" + measure_id + "'");
}

}  // namespace minflow::basesys
