#pragma once

// Numerical evidence engine: orbit-coverage probes for minimality, Weyl-sum
// eigenvalue detection, Birkhoff estimates of asymptotic-cycle data, and the
// independent brute-force oracle backing the exact membership routines.
//
// Everything here is evidence-grade; detector verdicts are bands, not proofs,
// and never overturn an exact verdict.

#include "minflow/suspension.hpp"

#include <random>
#include <utility>

namespace minflow::numlab {

using basesys::BaseState;
using suspension::SuspensionFlow;
using suspension::SuspensionPoint;

struct CoverageReport {
  int grid_x = 0;
  int grid_y = 0;
  long long steps = 0;
  double fraction = 0.0;                               // visited cells / total
  std::vector<std::uint32_t> histogram;                // row-major, grid_x * grid_y
  std::vector<std::pair<long long, double>> curve;     // (checkpoint, fraction)
};

/// Iterates the time-t map from `start`, bins chart images on a grid
/// (circle bases: (coordinate, height/f); odometer bases: (cylinder index,
/// height/f)) and reports the visited fraction. Deterministic.
CoverageReport orbit_coverage(const SuspensionFlow& flow, double t, const SuspensionPoint& start,
                              long long steps, std::pair<int, int> grid);

struct DetectorThresholds {
  double positive = 0.5;
  double negative = 0.1;
};

enum class DetectorVerdict { EigenPositive, EigenNegative, Inconclusive };
const char* verdict_label(DetectorVerdict v);

struct DetectorReport {
  double lambda = 0.0;
  std::string family;
  std::vector<std::pair<long long, double>> magnitudes;  // (checkpoint, D_N)
  double final_magnitude = 0.0;
  DetectorVerdict verdict = DetectorVerdict::Inconclusive;
};

using TestFamily = std::vector<basesys::BaseCharacter>;

/// Character family for the detector: circle/torus characters up to `order`,
/// or all cylinder characters of the odometer's group depth.
TestFamily character_family(const basesys::BaseSystem& system, int order);

/// Correlates e^{2 pi i lambda alpha_f(x,n)} against base test functions:
/// D_N = max_g |(1/N) sum e^{2 pi i lambda alpha_f(x,n)} conj(g(S^n x))|.
/// D_N -> 1 exactly when lambda lifts an eigenvalue the family sees.
DetectorReport weyl_detector(const SuspensionFlow& flow, double lambda, const BaseState& start,
                             long long steps, const TestFamily& tests,
                             DetectorThresholds thresholds = {});

struct CycleEstimate {
  double estimate = 0.0;     // (lambda / N) sum f(S^n x)
  double exact_value = 0.0;  // lambda * integral f (numeric rendering)
  double residual = 0.0;
};

/// Birkhoff estimate of lambda * integral(f) along the orbit of `start`,
/// paired with the exact integral for residual reporting.
CycleEstimate asymptotic_cycle_estimate(const SuspensionFlow& flow, double lambda,
                                        const BaseState& start, long long steps,
                                        const std::string& measure_id);

/// Exhaustive search over rational coefficients |num| <= num_bound,
/// 1 <= den <= den_bound: first combination with |sum c_i g_i - x| < eps in
/// (denominator, numerator) order. Fully independent of the exact solver.
std::optional<std::vector<Rational>> membership_bruteforce_oracle(
    const std::vector<double>& generators, double x, int num_bound, int den_bound, double eps);

/// Max residual of the torus-chart conjugacy F o T^t = (R_{st} x R_t) o F
/// over random samples.
double torus_conjugacy_check(const SuspensionFlow& flow, double t, int samples,
                             std::mt19937_64& rng);

}  // namespace minflow::numlab
