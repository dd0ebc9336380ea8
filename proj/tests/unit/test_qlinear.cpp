#include "doctest.h"

#include "minflow/qlinear.hpp"

#include <random>

using namespace minflow;
using namespace minflow::qlinear;

namespace {

BasisPtr test_basis() {
  std::vector<GeneratorSpec> gens;
  gens.push_back({.name = "sqrt2",
                  .enclosure = {Rational(14, 10), Rational(15, 10)},
                  .refiner = RefinerKind::SqrtInt,
                  .sqrt_arg = 2,
                  .quadratic_closure = true});
  gens.push_back({.name = "sqrt3",
                  .enclosure = {Rational(17, 10), Rational(18, 10)},
                  .refiner = RefinerKind::DecimalLiteral,
                  .decimal_digits = "1.73205080756887729352744634150587236694280525381038"});
  gens.push_back({.name = "opq",
                  .enclosure = {Rational(157, 50), Rational(63, 20)},
                  .refiner = RefinerKind::Opaque});
  return GeneratorBasis::create(std::move(gens), "1, sqrt2, sqrt3, opq declared independent over Q");
}

ExactReal lit(const BasisPtr& b, std::string_view text) {
  auto v = parse_exact_real(b, text);
  REQUIRE(v.has_value());
  return *v;
}

Rational random_rational(std::mt19937_64& rng, int num_bound = 10, int den_bound = 12) {
  std::uniform_int_distribution<int> num(-num_bound, num_bound);
  std::uniform_int_distribution<int> den(1, den_bound);
  return Rational(num(rng), den(rng));
}

ExactReal random_exact(const BasisPtr& b, std::mt19937_64& rng) {
  std::vector<Rational> c(b->dimension());
  for (auto& q : c) q = random_rational(rng);
  return ExactReal(b, std::move(c));
}

// Independent Newton oracle for sqrt(2): upper bounds u_{k+1} = (u_k + 2/u_k)/2,
// paired lower bound 2/u. Quadratic convergence; all arithmetic exact.
Interval newton_sqrt2_oracle(int iterations) {
  Rational u(3, 2);
  for (int i = 0; i < iterations; ++i) u = (u + Rational(2) / u) / 2;
  return {Rational(2) / u, u};
}

}  // namespace

TEST_CASE("coefficientwise arithmetic") {
  auto b = test_basis();
  CHECK(lit(b, "1 + 2*sqrt2") + lit(b, "1/2 - sqrt2") == lit(b, "3/2 + sqrt2"));
  CHECK(scale(lit(b, "sqrt2"), Rational(0)) == ExactReal::zero(b));
  CHECK(-lit(b, "3/2 + 2*sqrt2") == lit(b, "-3/2 - 2*sqrt2"));
}

TEST_CASE("arithmetic rejects foreign bases") {
  auto b1 = test_basis();
  auto b2 = test_basis();
  CHECK_THROWS_AS(lit(b1, "sqrt2") + lit(b2, "sqrt2"), BasisMismatchError);
  try {
    (void)(lit(b1, "1") - lit(b2, "1"));
    FAIL("expected mismatch");
  } catch (const BasisMismatchError& e) {
    CHECK(std::string(e.what()).find("basis(") != std::string::npos);
  }
}

TEST_CASE("approx meets requested widths") {
  auto b = test_basis();
  const Rational eps6(1, 1000000);

  Interval i = lit(b, "sqrt2").approx(eps6);
  CHECK(i.width() <= eps6);
  // frozen decimal bracket, cross-checked against the Newton oracle
  CHECK(i.lo >= Rational(1414213, 1000000));
  CHECK(i.hi <= Rational(1414214, 1000000));
  Interval oracle = newton_sqrt2_oracle(6);
  CHECK(oracle.width() < eps6);
  CHECK(overlap(i, oracle));

  Interval r = lit(b, "3/2").approx(Rational(1, 7));
  CHECK(r.lo == Rational(3, 2));
  CHECK(r.hi == Rational(3, 2));

  const Rational eps3(1, 1000);
  Interval s = lit(b, "1 + sqrt2").approx(eps3);
  CHECK(s.width() <= eps3);
  // contains 1 + sqrt2 = 2.4142...: bracket the true value independently
  Interval shifted = newton_sqrt2_oracle(8);
  shifted.lo += 1;
  shifted.hi += 1;
  CHECK(overlap(s, shifted));
  CHECK(s.lo >= Rational(24132, 10000));
  CHECK(s.hi <= Rational(24152, 10000));
}

TEST_CASE("approx failure modes carry the best interval") {
  auto b = test_basis();
  // opaque generator cannot go below its declared width (0.01)
  CHECK_THROWS_AS(lit(b, "opq").approx(Rational(1, 1000)), RefinementError);
  try {
    lit(b, "opq").approx(Rational(1, 1000));
  } catch (const RefinementError& e) {
    CHECK(e.best_interval.lo == Rational(157, 50));
    CHECK(e.best_interval.hi == Rational(63, 20));
  }
  // decimal literal runs out of digits eventually
  auto short_b = GeneratorBasis::create(
      {{.name = "g",
        .enclosure = {Rational(1, 2), Rational(2, 3)},
        .refiner = RefinerKind::DecimalLiteral,
        .decimal_digits = "0.61"}},
      "test");
  CHECK_THROWS_AS(ExactReal::generator(short_b, 0).approx(Rational(1, 10000)),
                  RefinementError);
}

TEST_CASE("decimal literal refiner produces nested shrinking enclosures") {
  auto b = test_basis();
  Interval wide = b->refined_enclosure(1, Rational(1, 100));
  Interval tight = b->refined_enclosure(1, Rational(1, 100000));
  CHECK(tight.width() < wide.width());
  CHECK(wide.lo <= tight.lo);
  CHECK(tight.hi <= wide.hi);
  // sqrt3 = 1.7320508...
  CHECK(tight.contains(Rational(17320508, 10000000)));
}

TEST_CASE("qspan membership with certificates") {
  auto b = test_basis();
  auto one = ExactReal::rational(b, 1);
  auto s2 = ExactReal::generator(b, 0);
  auto s3 = ExactReal::generator(b, 1);

  QSubspace v = QSubspace::span_of(b, {one, s2});
  auto c = qspan_membership(v, lit(b, "3/2 + 2*sqrt2"));
  REQUIRE(c.has_value());
  CHECK((*c)[0] == Rational(3, 2));
  CHECK((*c)[1] == Rational(2));

  CHECK_FALSE(qspan_membership(v, s3).has_value());

  QSubspace w = QSubspace::span_of(b, {lit(b, "1 + sqrt2")});
  auto c2 = qspan_membership(w, lit(b, "2 + 2*sqrt2"));
  REQUIRE(c2.has_value());
  CHECK((*c2)[0] == Rational(2));
  // recombine: 2 * (1 + sqrt2) = 2 + 2 sqrt2
  CHECK(scale(lit(b, "1 + sqrt2"), (*c2)[0]) == lit(b, "2 + 2*sqrt2"));
}

TEST_CASE("subgroup membership needs integer coefficients") {
  auto b = test_basis();
  FgSubgroup g =
      FgSubgroup::generated_by(b, {ExactReal::rational(b, 1), ExactReal::generator(b, 0)});

  auto m = subgroup_membership(g, lit(b, "5 - 3*sqrt2"));
  REQUIRE(m.has_value());
  CHECK((*m)[0] == 5);
  CHECK((*m)[1] == -3);

  CHECK_FALSE(subgroup_membership(g, lit(b, "1/2*sqrt2")).has_value());

  FgSubgroup sixth = FgSubgroup::generated_by(b, {ExactReal::rational(b, Rational(1, 6))});
  CHECK_FALSE(subgroup_membership(sixth, ExactReal::rational(b, Rational(5, 12))).has_value());
  auto m2 = subgroup_membership(sixth, ExactReal::rational(b, Rational(5, 6)));
  REQUIRE(m2.has_value());
  CHECK((*m2)[0] == 5);
}

TEST_CASE("subgroup membership searches the full integer lattice") {
  auto b = test_basis();
  // dependent generators: 1/2 and 1/3; 1/6 = 1*(1/2) - 1*(1/3) even though the
  // naive rational solve yields non-integral coefficients
  FgSubgroup g = FgSubgroup::generated_by(
      b, {ExactReal::rational(b, Rational(1, 2)), ExactReal::rational(b, Rational(1, 3))});
  auto m = subgroup_membership(g, ExactReal::rational(b, Rational(1, 6)));
  REQUIRE(m.has_value());
  CHECK(g.combine(*m) == ExactReal::rational(b, Rational(1, 6)));
  CHECK_FALSE(subgroup_membership(g, ExactReal::rational(b, Rational(1, 12))).has_value());
}

TEST_CASE("qspan_of canonicalizes") {
  auto b = test_basis();
  auto one = ExactReal::rational(b, 1);
  auto s2 = ExactReal::generator(b, 0);

  QSubspace v = qspan_of(FgSubgroup::generated_by(b, {one, s2}));
  CHECK(v.rank() == 2);

  QSubspace rationals = qspan_of(FgSubgroup::generated_by(
      b, {ExactReal::rational(b, Rational(1, 2)), ExactReal::rational(b, Rational(1, 3))}));
  CHECK(rationals.rank() == 1);
  CHECK(rationals.basis_matrix()[0][0] == Rational(1));

  QSubspace zero = qspan_of(FgSubgroup::generated_by(b, {}));
  CHECK(zero.rank() == 0);
  CHECK(zero.contains(ExactReal::zero(b)));
  CHECK_FALSE(zero.contains(one));
}

TEST_CASE("reciprocal") {
  auto b = test_basis();
  auto r = reciprocal(ExactReal::rational(b, Rational(2, 3)));
  REQUIRE(r.has_value());
  CHECK(*r == ExactReal::rational(b, Rational(3, 2)));

  auto q = reciprocal(lit(b, "1 + sqrt2"));
  REQUIRE(q.has_value());
  CHECK(*q == lit(b, "-1 + sqrt2"));
  auto prod = try_mul(lit(b, "1 + sqrt2"), *q);
  REQUIRE(prod.has_value());
  CHECK(*prod == ExactReal::rational(b, 1));

  CHECK_FALSE(reciprocal(lit(b, "opq")).has_value());
  CHECK_FALSE(reciprocal(lit(b, "sqrt2 + sqrt3")).has_value());
  CHECK_THROWS_AS(reciprocal(ExactReal::zero(b)), DivisionByZeroError);
}

TEST_CASE("try_mul covers rational and quadratic cases only") {
  auto b = test_basis();
  auto p = try_mul(ExactReal::rational(b, Rational(3, 7)), lit(b, "2 + sqrt3"));
  REQUIRE(p.has_value());
  CHECK(*p == lit(b, "6/7 + 3/7*sqrt3"));

  auto q = try_mul(lit(b, "1 + 2*sqrt2"), lit(b, "3 - sqrt2"));
  REQUIRE(q.has_value());
  CHECK(*q == lit(b, "-1 + 5*sqrt2"));  // 3 - sqrt2 + 6 sqrt2 - 2*2

  CHECK_FALSE(try_mul(lit(b, "sqrt2"), lit(b, "sqrt3")).has_value());
  CHECK_FALSE(try_mul(lit(b, "sqrt3"), lit(b, "sqrt3")).has_value());  // no closure flag
}

TEST_CASE("sign and floor by interval refinement") {
  auto b = test_basis();
  CHECK(lit(b, "sqrt2 - 1").sign() == 1);
  CHECK(lit(b, "sqrt2 - 3/2").sign() == -1);
  CHECK(ExactReal::zero(b).sign() == 0);
  CHECK(lit(b, "-7/3").sign() == -1);

  CHECK(lit(b, "3 + 2*sqrt2").floor() == 5);
  CHECK(lit(b, "sqrt2").floor() == 1);
  CHECK(lit(b, "-1/2").floor() == -1);
  CHECK(lit(b, "7/2").floor() == 3);
  CHECK(lit(b, "-sqrt2").floor() == -2);
}

TEST_CASE("literal parsing round-trips rendering") {
  auto b = test_basis();
  std::mt19937_64 rng(20260811);
  for (int i = 0; i < 200; ++i) {
    ExactReal x = random_exact(b, rng);
    auto back = parse_exact_real(b, x.to_string());
    REQUIRE(back.has_value());
    CHECK(*back == x);
  }
  CHECK_FALSE(parse_exact_real(b, "2*zeta").has_value());
  CHECK_FALSE(parse_exact_real(b, "").has_value());
  CHECK_FALSE(parse_exact_real(b, "1 ++ 2").has_value());
}

TEST_CASE("equality is coefficient equality") {
  auto b = test_basis();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    ExactReal x = random_exact(b, rng);
    ExactReal y = random_exact(b, rng);
    CHECK(x == x);
    CHECK((x == y) == (x.coeffs() == y.coeffs()));
    if (x == y) CHECK(y == x);
  }
}

TEST_CASE("membership certificates recombine exactly and numerically") {
  auto b = test_basis();
  std::mt19937_64 rng(99);
  auto one = ExactReal::rational(b, 1);
  auto s2 = ExactReal::generator(b, 0);
  auto s3 = ExactReal::generator(b, 1);
  FgSubgroup g = FgSubgroup::generated_by(b, {one, s2, s3});

  std::uniform_int_distribution<int> n(-10, 10);
  for (int i = 0; i < 100; ++i) {
    std::vector<Integer> coeffs{Integer(n(rng)), Integer(n(rng)), Integer(n(rng))};
    ExactReal x = g.combine(coeffs);
    auto cert = subgroup_membership(g, x);
    REQUIRE(cert.has_value());
    ExactReal back = g.combine(*cert);
    CHECK(back == x);

    // negation certificate
    std::vector<Integer> neg;
    for (const auto& c : *cert) neg.push_back(-c);
    CHECK(g.combine(neg) == -x);

    // numeric consistency at several precisions
    for (int k : {3, 9, 15}) {
      Rational eps(1, 1);
      for (int j = 0; j < k; ++j) eps /= 10;
      CHECK(overlap(back.approx(eps), x.approx(eps)));
    }

    // subgroup membership implies qspan membership
    auto rc = qspan_membership(g.qspan(), x);
    REQUIRE(rc.has_value());
  }
}

TEST_CASE("membership agrees with exhaustive lattice search") {
  auto b = test_basis();
  std::mt19937_64 rng(4242);
  auto one = ExactReal::rational(b, 1);
  auto s2 = ExactReal::generator(b, 0);
  FgSubgroup g = FgSubgroup::generated_by(b, {one, s2});

  auto exhaustive = [&](const ExactReal& x) -> bool {
    for (int a = -10; a <= 10; ++a)
      for (int c = -10; c <= 10; ++c)
        if (scale(one, a) + scale(s2, c) == x) return true;
    return false;
  };

  std::uniform_int_distribution<int> n(-8, 8);
  std::uniform_int_distribution<int> d(1, 3);
  for (int i = 0; i < 60; ++i) {
    // mix of members and non-members with small denominators
    ExactReal x = scale(one, Rational(n(rng), d(rng))) + scale(s2, Rational(n(rng), d(rng)));
    CHECK(subgroup_membership(g, x).has_value() == exhaustive(x));
  }
}
