#include "doctest.h"

#include "minflow/suspension.hpp"

#include <cmath>
#include <random>

using namespace minflow;
using namespace minflow::basesys;
using namespace minflow::suspension;
using qlinear::ExactReal;
using qlinear::GeneratorSpec;
using qlinear::GeneratorBasis;
using qlinear::RefinerKind;

namespace {

BasisPtr demo_basis() {
  std::vector<GeneratorSpec> gens;
  gens.push_back({.name = "sqrt2",
                  .enclosure = {Rational(14, 10), Rational(15, 10)},
                  .refiner = RefinerKind::SqrtInt,
                  .sqrt_arg = 2,
                  .quadratic_closure = true});
  gens.push_back({.name = "sqrt3",
                  .enclosure = {Rational(17, 10), Rational(18, 10)},
                  .refiner = RefinerKind::SqrtInt,
                  .sqrt_arg = 3});
  return GeneratorBasis::create(std::move(gens), "1, sqrt2, sqrt3 independent over Q");
}

CeilingFunction one(const BasisPtr& b) {
  return CeilingFunction{CeilingFunction::Constant{ExactReal::rational(b, 1)}};
}

SuspensionFlow rotation_flow(const BasisPtr& b) {
  return {BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}}, one(b)};
}

SuspensionFlow odometer_flow(const BasisPtr& b) {
  return {BaseSystem{"odo", b, Odometer{{2, 2, 3}}}, one(b)};
}

double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  d = d - std::floor(d);
  return std::min(d, 1.0 - d);
}

double base_gap(const BaseState& a, const BaseState& b) {
  if (const auto* ca = std::get_if<CircleState>(&a)) {
    const auto* cb = std::get_if<CircleState>(&b);
    return cb ? circle_dist(ca->x, cb->x) : 1.0;
  }
  if (const auto* oa = std::get_if<OdometerState>(&a)) {
    const auto* ob = std::get_if<OdometerState>(&b);
    return (ob && *oa == *ob) ? 0.0 : 1.0;
  }
  if (std::holds_alternative<PointState>(a)) return 0.0;
  return 1.0;
}

// distance between canonical representatives, tolerant of a single wrap at
// the fundamental-domain seam
double point_gap(const SuspensionFlow& flow, const SuspensionPoint& p, const SuspensionPoint& q) {
  double direct = base_gap(p.base, q.base) + std::fabs(p.height - q.height);
  double fp = flow.ceiling.eval(flow.base, p.base);
  double fq = flow.ceiling.eval(flow.base, q.base);
  double up = (fp - p.height) + q.height + base_gap(step(flow.base, p.base, 1), q.base);
  double dn = p.height + (fq - q.height) + base_gap(p.base, step(flow.base, q.base, 1));
  return std::min({direct, up, dn});
}

}  // namespace

TEST_CASE("cocycle formula cases") {
  auto b = demo_basis();
  auto flow = rotation_flow(b);
  BaseState x = CircleState{0.37};

  CHECK(cocycle_alpha(flow, x, 0) == 0.0);
  CHECK(cocycle_alpha(flow, x, 5) == doctest::Approx(5.0).epsilon(1e-12));

  double f_back = flow.ceiling.eval(flow.base, step(flow.base, x, -1));
  CHECK(cocycle_alpha(flow, x, -1) == doctest::Approx(-f_back).epsilon(1e-12));
}

TEST_CASE("cocycle identity") {
  auto b = demo_basis();
  SuspensionFlow flow{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                      CeilingFunction{CeilingFunction::TrigPoly{
                          Rational(2), {TrigTerm{1, 0, Rational(1, 2), Rational(0)}}}}};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-20, 20);
  BaseState x = CircleState{0.123};
  for (int i = 0; i < 60; ++i) {
    int m = d(rng), n = d(rng);
    double lhs = cocycle_alpha(flow, x, m + n);
    double rhs = cocycle_alpha(flow, x, m) + cocycle_alpha(flow, step(flow.base, x, m), n);
    CHECK(std::fabs(lhs - rhs) <= 1e-9);
  }

  // exact route over the odometer
  auto oflow = odometer_flow(b);
  SuspensionFlow cyl{oflow.base,
                     CeilingFunction{CeilingFunction::CylinderValues{
                         1, {Rational(1), Rational(3)}}}};
  BaseState z = OdometerState{};
  for (int i = 0; i < 40; ++i) {
    int m = d(rng), n = d(rng);
    auto lhs = cocycle_alpha_exact(cyl, z, m + n);
    auto mid = cocycle_alpha_exact(cyl, z, m);
    auto rhs = cocycle_alpha_exact(cyl, step(cyl.base, z, m), n);
    REQUIRE(lhs.has_value());
    REQUIRE(mid.has_value());
    REQUIRE(rhs.has_value());
    CHECK(*lhs == *mid + *rhs);
  }
}

TEST_CASE("flow wraps through the fundamental domain") {
  auto b = demo_basis();
  auto flow = rotation_flow(b);
  double s = ExactReal::generator(b, 0).numeric();

  SuspensionPoint p{CircleState{0.1}, 0.25};
  auto q = flow_by(flow, p, 0.5);
  CHECK(std::get<CircleState>(q.base).x == 0.1);
  CHECK(q.height == doctest::Approx(0.75).epsilon(1e-12));

  auto r = flow_by(flow, SuspensionPoint{CircleState{0.1}, 0.75}, 0.5);
  CHECK(std::get<CircleState>(r.base).x == doctest::Approx(std::fmod(0.1 + s, 1.0)));
  CHECK(r.height == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("flow is an R-action") {
  auto b = demo_basis();
  auto flow = rotation_flow(b);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> time(-10.0, 10.0);

  for (int i = 0; i < 100; ++i) {
    SuspensionPoint p{CircleState{coord(rng)}, coord(rng) * 0.999};
    // identity at t = 0
    auto z = flow_by(flow, p, 0.0);
    CHECK(point_gap(flow, z, p) <= 1e-12);
    // additivity
    double t1 = time(rng), t2 = time(rng);
    auto lhs = flow_by(flow, flow_by(flow, p, t1), t2);
    auto rhs = flow_by(flow, p, t1 + t2);
    CHECK(point_gap(flow, lhs, rhs) <= 1e-9);
  }
}

TEST_CASE("normalization keeps heights in the half-open fiber") {
  auto b = demo_basis();
  SuspensionFlow flow{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                      CeilingFunction{CeilingFunction::TrigPoly{
                          Rational(2), {TrigTerm{1, 0, Rational(1, 2), Rational(0)}}}}};
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> raw(-25.0, 25.0);
  for (int i = 0; i < 200; ++i) {
    auto p = normalize(flow, CircleState{coord(rng)}, raw(rng));
    double f = flow.ceiling.eval(flow.base, p.base);
    CHECK(p.height >= 0.0);
    CHECK(p.height < f);
  }
}

TEST_CASE("wrap search reports budget exhaustion with the partial count") {
  auto b = demo_basis();
  SuspensionFlow flow{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                      CeilingFunction{CeilingFunction::TrigPoly{
                          Rational(2), {TrigTerm{1, 0, Rational(1, 2), Rational(0)}}}}};
  try {
    flow_by(flow, SuspensionPoint{CircleState{0.0}, 0.0}, 9.0e6);
    FAIL("expected a budget error");
  } catch (const FlowBudgetError& e) {
    CHECK(e.partial_steps > 1000000);
  }
}

TEST_CASE("constant ceilings advance the base by exactly one step per period") {
  auto b = demo_basis();
  SuspensionFlow flow{BaseSystem{"odo", b, Odometer{{2, 2, 3}}},
                      CeilingFunction{CeilingFunction::Constant{
                          qlinear::ExactReal::rational(b, 2)}}};
  SuspensionPoint p{OdometerState{}, 0.8};
  auto q = flow_by(flow, p, 2.0);
  CHECK(std::get<OdometerState>(q.base) ==
        std::get<OdometerState>(step(flow.base, p.base, 1)));
  CHECK(q.height == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("time map freezes the flow parameter") {
  auto b = demo_basis();
  // the circle as standard suspension of the one-point system: the time-t map
  // is rotation by t on the fiber
  SuspensionFlow pt{BaseSystem{"pt", b, PointSystem{}}, one(b)};
  double s = ExactReal::generator(b, 0).numeric();
  auto rot_s = time_map(pt, s);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double h = coord(rng);
    auto moved = rot_s.step(SuspensionPoint{PointState{}, h});
    double expect = h + s >= 1.0 ? h + s - 1.0 : h + s;
    CHECK(circle_dist(moved.height, expect) <= 1e-12);
  }

  // t = 0 is the identity
  auto idmap = time_map(pt, 0.0);
  for (int i = 0; i < 100; ++i) {
    double h = coord(rng);
    CHECK(idmap.step(SuspensionPoint{PointState{}, h}).height == h);
  }

  // composition law
  auto flow = rotation_flow(b);
  auto f1 = time_map(flow, 0.7);
  auto f2 = time_map(flow, 1.9);
  auto f12 = time_map(flow, 2.6);
  for (int i = 0; i < 50; ++i) {
    SuspensionPoint p{CircleState{coord(rng)}, coord(rng) * 0.999};
    CHECK(point_gap(flow, f2.step(f1.step(p)), f12.step(p)) <= 1e-9);
  }
}

TEST_CASE("torus chart intertwines the flow with the product rotation") {
  auto b = demo_basis();
  auto flow = rotation_flow(b);
  double s = ExactReal::generator(b, 0).numeric();

  auto origin = torus_chart(flow, SuspensionPoint{CircleState{0.0}, 0.0});
  CHECK(origin.first == 0.0);
  CHECK(origin.second == 0.0);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> time(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    SuspensionPoint p{CircleState{coord(rng)}, coord(rng) * 0.999};
    double t = time(rng);
    auto lhs = torus_chart(flow, flow_by(flow, p, t));
    auto c = torus_chart(flow, p);
    double r1 = c.first + s * t;
    double r2 = c.second + t;
    worst = std::max(worst, circle_dist(lhs.first, r1 - std::floor(r1)));
    worst = std::max(worst, circle_dist(lhs.second, r2 - std::floor(r2)));
  }
  CHECK(worst <= 1e-9);

  // injectivity on a random sample
  std::vector<std::pair<double, double>> images;
  for (int i = 0; i < 1000; ++i) {
    SuspensionPoint p{CircleState{coord(rng)}, coord(rng) * 0.999};
    images.push_back(torus_chart(flow, p));
  }
  int collisions = 0;
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (circle_dist(images[i].first, images[j].first) < 1e-6 &&
          circle_dist(images[i].second, images[j].second) < 1e-6)
        ++collisions;
  CHECK(collisions == 0);

  // unsupported charts are rejected
  CHECK_THROWS_AS(torus_chart(odometer_flow(b), SuspensionPoint{OdometerState{}, 0.0}),
                  AdmissibilityError);
}

TEST_CASE("exact integration") {
  auto b = demo_basis();
  BaseSystem rot{"rot", b, CircleRotation{ExactReal::generator(b, 0)}};
  BaseSystem odo{"odo", b, Odometer{{2, 2, 3}}};

  CeilingFunction bump{CeilingFunction::TrigPoly{
      Rational(2), {TrigTerm{1, 0, Rational(1, 2), Rational(0)}}}};
  CHECK(integrate(rot, "lebesgue", bump) == ExactReal::rational(b, 2));

  CeilingFunction cyl{CeilingFunction::CylinderValues{1, {Rational(1), Rational(3)}}};
  CHECK(integrate(odo, "product", cyl) == ExactReal::rational(b, 2));

  for (const BaseSystem* sys : {&rot, &odo}) {
    CeilingFunction unit{CeilingFunction::Constant{ExactReal::rational(b, 1)}};
    CHECK(integrate(*sys, measure_ids(*sys)[0], unit) == ExactReal::rational(b, 1));
  }

  // Q-linearity over the admissible class
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> n(-6, 6);
  for (int i = 0; i < 40; ++i) {
    Rational a(n(rng), 3), c(n(rng), 2);
    Rational f0(n(rng) + 8), g0(n(rng) + 8);
    CeilingFunction f{CeilingFunction::TrigPoly{f0, {TrigTerm{1, 0, Rational(1, 3), Rational(0)}}}};
    CeilingFunction g{CeilingFunction::TrigPoly{g0, {TrigTerm{2, 0, Rational(0), Rational(1, 5)}}}};
    CeilingFunction combo{CeilingFunction::TrigPoly{
        a * f0 + c * g0,
        {TrigTerm{1, 0, a * Rational(1, 3), Rational(0)},
         TrigTerm{2, 0, Rational(0), c * Rational(1, 5)}}}};
    auto lhs = integrate(rot, "lebesgue", combo);
    auto rhs = qlinear::scale(integrate(rot, "lebesgue", f), a) +
               qlinear::scale(integrate(rot, "lebesgue", g), c);
    CHECK(lhs == rhs);
  }

  // inadmissible pairs name the admissible class
  try {
    integrate(odo, "product", bump);
    FAIL("expected admissibility error");
  } catch (const AdmissibilityError& e) {
    CHECK(std::string(e.what()).find("odometers") != std::string::npos);
  }
  CHECK_THROWS_AS(integrate(rot, "nope", bump), AdmissibilityError);
}

TEST_CASE("ceiling positivity validation") {
  auto b = demo_basis();
  BaseSystem rot{"rot", b, CircleRotation{ExactReal::generator(b, 0)}};

  CeilingFunction good{CeilingFunction::TrigPoly{
      Rational(2), {TrigTerm{1, 0, Rational(1, 2), Rational(1, 3)}}}};
  CHECK_NOTHROW(good.validate_positive(rot));

  CeilingFunction bad{CeilingFunction::TrigPoly{
      Rational(1), {TrigTerm{1, 0, Rational(2, 3), Rational(1, 2)}}}};
  CHECK_THROWS_AS(bad.validate_positive(rot), AdmissibilityError);

  CeilingFunction negc{CeilingFunction::Constant{ExactReal::rational(b, Rational(-1, 2))}};
  CHECK_THROWS_AS(negc.validate_positive(rot), AdmissibilityError);

  BaseSystem odo{"odo", b, Odometer{{2, 2, 3}}};
  CeilingFunction cyl_bad{CeilingFunction::CylinderValues{1, {Rational(1), Rational(0)}}};
  CHECK_THROWS_AS(cyl_bad.validate_positive(odo), AdmissibilityError);

  CeilingFunction coho{CeilingFunction::CohomologousToConstant{
      ExactReal::rational(b, 1), {TrigTerm{1, 0, Rational(1, 10), Rational(0)}}}};
  CHECK_NOTHROW(coho.validate_positive(rot));
  CHECK(integrate(rot, "lebesgue", coho) == ExactReal::rational(b, 1));
}
