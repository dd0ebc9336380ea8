#include <benchmark/benchmark.h>

#include "minflow/spectra.hpp"

using namespace minflow;
using namespace minflow::basesys;
using namespace minflow::suspension;
using qlinear::BasisPtr;
using qlinear::ExactReal;

namespace {

BasisPtr bench_basis() {
  std::vector<qlinear::GeneratorSpec> gens;
  gens.push_back({.name = "sqrt2",
                  .enclosure = {Rational(14, 10), Rational(15, 10)},
                  .refiner = qlinear::RefinerKind::SqrtInt,
                  .sqrt_arg = 2,
                  .quadratic_closure = true});
  gens.push_back({.name = "sqrt3",
                  .enclosure = {Rational(17, 10), Rational(18, 10)},
                  .refiner = qlinear::RefinerKind::SqrtInt,
                  .sqrt_arg = 3});
  return qlinear::GeneratorBasis::create(std::move(gens), "bench basis");
}

}  // namespace

static void BM_SubgroupMembership(benchmark::State& state) {
  auto b = bench_basis();
  auto group = qlinear::FgSubgroup::generated_by(
      b, {ExactReal::rational(b, 1), ExactReal::generator(b, 0)});
  auto x = *qlinear::parse_exact_real(b, "17/6 - 9/4*sqrt2");
  for (auto _ : state) {
    auto cert = group.membership(x);
    benchmark::DoNotOptimize(cert);
  }
}
BENCHMARK(BM_SubgroupMembership);

static void BM_QspanMembership(benchmark::State& state) {
  auto b = bench_basis();
  auto span = qlinear::QSubspace::span_of(
      b, {ExactReal::rational(b, 1), ExactReal::generator(b, 0)});
  auto x = *qlinear::parse_exact_real(b, "17/6 - 9/4*sqrt2");
  for (auto _ : state) {
    auto cert = span.membership(x);
    benchmark::DoNotOptimize(cert);
  }
}
BENCHMARK(BM_QspanMembership);

static void BM_DecideTimeMap(benchmark::State& state) {
  auto b = bench_basis();
  SuspensionFlow rot{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                     CeilingFunction{CeilingFunction::Constant{ExactReal::rational(b, 1)}}};
  auto rho = *qlinear::parse_exact_real(b, "3/2 + 2*sqrt2");
  for (auto _ : state) {
    auto verdict = spectra::decide_time_map(rot, rho);
    benchmark::DoNotOptimize(verdict);
  }
}
BENCHMARK(BM_DecideTimeMap);

static void BM_ExactApprox(benchmark::State& state) {
  auto b = bench_basis();
  auto x = *qlinear::parse_exact_real(b, "3/2 + 2*sqrt2 - 1/3*sqrt3");
  Rational eps(1, 1);
  for (int i = 0; i < state.range(0); ++i) eps /= 10;
  for (auto _ : state) {
    auto interval = x.approx(eps);
    benchmark::DoNotOptimize(interval);
  }
}
BENCHMARK(BM_ExactApprox)->Arg(6)->Arg(12)->Arg(24);

BENCHMARK_MAIN();
