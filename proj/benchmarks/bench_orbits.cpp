#include <benchmark/benchmark.h>

#include "minflow/numlab.hpp"

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
  return qlinear::GeneratorBasis::create(std::move(gens), "bench basis");
}

}  // namespace

static void BM_FlowStepConstant(benchmark::State& state) {
  auto b = bench_basis();
  SuspensionFlow rot{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                     CeilingFunction{CeilingFunction::Constant{ExactReal::rational(b, 1)}}};
  SuspensionPoint p{CircleState{0.123}, 0.456};
  for (auto _ : state) {
    p = flow_by(rot, p, 0.37);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_FlowStepConstant);

static void BM_FlowStepTrig(benchmark::State& state) {
  auto b = bench_basis();
  SuspensionFlow flow{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                      CeilingFunction{CeilingFunction::TrigPoly{
                          Rational(2), {TrigTerm{1, 0, Rational(1, 2), Rational(0)}}}}};
  SuspensionPoint p{CircleState{0.123}, 0.456};
  for (auto _ : state) {
    p = flow_by(flow, p, 0.37);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_FlowStepTrig);

static void BM_OdometerStep(benchmark::State& state) {
  auto b = bench_basis();
  BaseSystem odo{"odo", b, Odometer{{2, 2, 3}}};
  BaseState x = OdometerState{};
  for (auto _ : state) {
    x = step(odo, x, 1);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_OdometerStep);

static void BM_WeylDetector(benchmark::State& state) {
  auto b = bench_basis();
  SuspensionFlow rot{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                     CeilingFunction{CeilingFunction::Constant{ExactReal::rational(b, 1)}}};
  auto family = numlab::character_family(rot.base, 8);
  BaseState start = CircleState{0.2};
  double lambda = 1.0 + ExactReal::generator(b, 0).numeric();
  for (auto _ : state) {
    auto report = numlab::weyl_detector(rot, lambda, start, state.range(0), family);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_WeylDetector)->Arg(1000)->Arg(10000);

static void BM_Coverage(benchmark::State& state) {
  auto b = bench_basis();
  SuspensionFlow rot{BaseSystem{"rot", b, CircleRotation{ExactReal::generator(b, 0)}},
                     CeilingFunction{CeilingFunction::Constant{ExactReal::rational(b, 1)}}};
  SuspensionPoint start{CircleState{0.1}, 0.2};
  for (auto _ : state) {
    auto report = numlab::orbit_coverage(rot, 0.591, start, state.range(0), {64, 64});
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_Coverage)->Arg(10000);

BENCHMARK_MAIN();
