#include "minflow/numlab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace minflow::numlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

std::vector<long long> checkpoints_for(long long steps) {
  std::vector<long long> cps;
  for (long long div = 128; div >= 2; div /= 2) {
    long long c = steps / div;
    if (c >= 1) cps.push_back(c);
  }
  cps.push_back(steps);
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

// chart onto [0,1)^2: (base coordinate or cylinder index, height / ceiling)
struct Chart {
  const SuspensionFlow* flow;
  const basesys::Odometer* odo = nullptr;
  int depth = 0;
  double inv_count = 1.0;

  static Chart make(const SuspensionFlow& flow, int grid_x) {
    Chart c{&flow};
    if (const auto* odo = std::get_if<basesys::Odometer>(&flow.base.kind)) {
      c.odo = odo;
      Integer prod = 1;
      int d = 0;
      while (prod < grid_x && d < 24) {
        prod *= basesys::odometer_digit_bound(*odo, d);
        ++d;
      }
      c.depth = std::max(d, 1);
      c.inv_count =
          1.0 / basesys::odometer_level_product(*odo, c.depth).convert_to<double>();
      return c;
    }
    if (std::get_if<basesys::CircleRotation>(&flow.base.kind) ||
        std::get_if<basesys::Denjoy>(&flow.base.kind) ||
        std::get_if<basesys::PointSystem>(&flow.base.kind))
      return c;
    throw basesys::UnsupportedOperation(
        "coverage chart supports circle-based and odometer-based flows only");
  }

  std::pair<double, double> operator()(const SuspensionPoint& p) const {
    double u = 0.0;
    if (odo) {
      const auto& st = std::get<basesys::OdometerState>(p.base);
      u = basesys::odometer_counter(*odo, st, depth).convert_to<double>() * inv_count;
    } else if (const auto* cs = std::get_if<basesys::CircleState>(&p.base)) {
      u = cs->x;
    } else if (const auto* ds = std::get_if<basesys::DenjoyState>(&p.base)) {
      u = basesys::denjoy_factor(*ds);
    }
    double f = flow->ceiling.eval(flow->base, p.base);
    return {frac(u), frac(p.height / f)};
  }
};

}  // namespace

CoverageReport orbit_coverage(const SuspensionFlow& flow, double t, const SuspensionPoint& start,
                              long long steps, std::pair<int, int> grid) {
  if (steps < 1) throw std::invalid_argument("coverage needs at least one step");
  const auto [gx, gy] = grid;
  if (gx < 1 || gy < 1) throw std::invalid_argument("grid dimensions must be positive");

  Chart chart = Chart::make(flow, gx);
  CoverageReport report;
  report.grid_x = gx;
  report.grid_y = gy;
  report.steps = steps;
  report.histogram.assign(static_cast<std::size_t>(gx) * gy, 0);

  auto cps = checkpoints_for(steps);
  std::size_t next_cp = 0;
  long long visited = 0;
  SuspensionPoint p = start;
  for (long long n = 1; n <= steps; ++n) {
    auto [u, v] = chart(p);
    int cx = std::min(static_cast<int>(u * gx), gx - 1);
    int cy = std::min(static_cast<int>(v * gy), gy - 1);
    auto& cell = report.histogram[static_cast<std::size_t>(cy) * gx + cx];
    if (cell == 0) ++visited;
    ++cell;
    if (next_cp < cps.size() && n == cps[next_cp]) {
      report.curve.emplace_back(n, static_cast<double>(visited) / report.histogram.size());
      ++next_cp;
    }
    if (n < steps) p = suspension::flow_by(flow, p, t);
  }
  report.fraction = static_cast<double>(visited) / report.histogram.size();
  return report;
}

const char* verdict_label(DetectorVerdict v) {
  switch (v) {
    case DetectorVerdict::EigenPositive:
      return "eigen-positive";
    case DetectorVerdict::EigenNegative:
      return "eigen-negative";
    case DetectorVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

TestFamily character_family(const basesys::BaseSystem& system, int order) {
  TestFamily family;
  using Kind = basesys::BaseCharacter::Kind;
  if (std::get_if<basesys::PointSystem>(&system.kind)) {
    family.push_back({.kind = Kind::Trivial, .label = "trivial"});
    return family;
  }
  if (std::get_if<basesys::CircleRotation>(&system.kind) ||
      std::get_if<basesys::Denjoy>(&system.kind)) {
    for (int k = -order; k <= order; ++k)
      family.push_back(
          {.kind = Kind::Circle, .k1 = k, .label = "circle character " + std::to_string(k)});
    return family;
  }
  if (std::get_if<basesys::TorusTranslation>(&system.kind) ||
      std::get_if<basesys::Furstenberg>(&system.kind)) {
    for (int k1 = -order; k1 <= order; ++k1)
      for (int k2 = -order; k2 <= order; ++k2)
        family.push_back({.kind = Kind::Torus,
                          .k1 = k1,
                          .k2 = k2,
                          .label = "torus character (" + std::to_string(k1) + "," +
                                   std::to_string(k2) + ")"});
    return family;
  }
  if (const auto* odo = std::get_if<basesys::Odometer>(&system.kind)) {
    int depth = basesys::odometer_group_depth(*odo);
    Integer m = basesys::odometer_level_product(*odo, depth);
    long long count = m.convert_to<long long>();
    for (long long j = 0; j < count; ++j)
      family.push_back({.kind = Kind::OdometerCylinder,
                        .phase_per_count = Rational(Integer(j), m),
                        .depth = depth,
                        .label = "cylinder character " + std::to_string(j) + "/" + m.str()});
    return family;
  }
  throw basesys::UnsupportedOperation("no character family for this system kind");
}

DetectorReport weyl_detector(const SuspensionFlow& flow, double lambda, const BaseState& start,
                             long long steps, const TestFamily& tests,
                             DetectorThresholds thresholds) {
  if (tests.empty()) throw std::invalid_argument("detector needs a nonempty test family");
  if (steps < 1) throw std::invalid_argument("detector needs at least one step");

  // fast paths for homogeneous families
  bool all_circle = true, all_odo = true;
  int max_k = 0;
  for (const auto& g : tests) {
    all_circle = all_circle && g.kind == basesys::BaseCharacter::Kind::Circle;
    all_odo = all_odo && g.kind == basesys::BaseCharacter::Kind::OdometerCylinder;
    max_k = std::max(max_k, std::abs(g.k1));
  }
  const auto* odo = std::get_if<basesys::Odometer>(&flow.base.kind);
  all_odo = all_odo && odo != nullptr;

  long long modulus = 0;
  std::vector<long long> weights;  // odometer: character index j per test
  std::vector<std::complex<double>> roots;
  int odo_depth = 0;
  if (all_odo) {
    odo_depth = tests[0].depth;
    Integer m = basesys::odometer_level_product(*odo, odo_depth);
    modulus = m.convert_to<long long>();
    for (const auto& g : tests) {
      if (g.depth != odo_depth) {
        all_odo = false;
        break;
      }
      weights.push_back((g.phase_per_count * Rational(m)).convert_to<long long>() % modulus);
    }
    if (all_odo) {
      roots.resize(modulus);
      for (long long r = 0; r < modulus; ++r)
        roots[r] = std::polar(1.0, kTwoPi * static_cast<double>(r) / modulus);
    }
  }

  std::vector<std::complex<double>> powers(static_cast<std::size_t>(max_k) + 1);
  std::vector<std::complex<double>> values(tests.size());
  std::vector<std::complex<double>> acc(tests.size(), {0.0, 0.0});

  auto eval_family = [&](const BaseState& x) {
    if (all_circle) {
      double coord = 0.0;
      if (const auto* cs = std::get_if<basesys::CircleState>(&x))
        coord = cs->x;
      else if (const auto* ds = std::get_if<basesys::DenjoyState>(&x))
        coord = basesys::denjoy_factor(*ds);
      else
        throw std::invalid_argument("circle test family over a non-circle state");
      powers[0] = {1.0, 0.0};
      if (max_k > 0) {
        auto z = std::polar(1.0, kTwoPi * coord);
        for (int k = 1; k <= max_k; ++k) powers[k] = powers[k - 1] * z;
      }
      for (std::size_t i = 0; i < tests.size(); ++i) {
        int k = tests[i].k1;
        values[i] = k >= 0 ? powers[k] : std::conj(powers[-k]);
      }
      return;
    }
    if (all_odo) {
      const auto& st = std::get<basesys::OdometerState>(x);
      long long c =
          basesys::odometer_counter(*odo, st, odo_depth).convert_to<long long>() % modulus;
      for (std::size_t i = 0; i < tests.size(); ++i)
        values[i] = roots[static_cast<std::size_t>((weights[i] * c) % modulus)];
      return;
    }
    for (std::size_t i = 0; i < tests.size(); ++i) values[i] = tests[i].eval(flow.base, x);
  };

  DetectorReport report;
  report.lambda = lambda;
  report.family = tests.front().label + " .. " + tests.back().label;

  auto cps = checkpoints_for(steps);
  std::size_t next_cp = 0;
  BaseState x = start;
  double phase_turns = 0.0;  // lambda * alpha_f(x, n) mod 1, accumulated
  for (long long n = 0; n < steps; ++n) {
    auto w = std::polar(1.0, kTwoPi * phase_turns);
    eval_family(x);
    for (std::size_t i = 0; i < tests.size(); ++i) acc[i] += w * std::conj(values[i]);
    phase_turns = frac(phase_turns + lambda * flow.ceiling.eval(flow.base, x));
    x = basesys::step(flow.base, x, 1);
    if (next_cp < cps.size() && n + 1 == cps[next_cp]) {
      double best = 0.0;
      for (const auto& a : acc) best = std::max(best, std::abs(a) / static_cast<double>(n + 1));
      report.magnitudes.emplace_back(n + 1, best);
      ++next_cp;
    }
  }
  report.final_magnitude = report.magnitudes.back().second;
  report.verdict = report.final_magnitude >= thresholds.positive ? DetectorVerdict::EigenPositive
                   : report.final_magnitude <= thresholds.negative
                       ? DetectorVerdict::EigenNegative
                       : DetectorVerdict::Inconclusive;
  return report;
}

CycleEstimate asymptotic_cycle_estimate(const SuspensionFlow& flow, double lambda,
                                        const BaseState& start, long long steps,
                                        const std::string& measure_id) {
  if (steps < 1) throw std::invalid_argument("cycle estimate needs at least one step");
  double sum = 0.0;
  BaseState x = start;
  for (long long n = 0; n < steps; ++n) {
    sum += flow.ceiling.eval(flow.base, x);
    x = basesys::step(flow.base, x, 1);
  }
  CycleEstimate out;
  out.estimate = lambda * (sum / static_cast<double>(steps));
  out.exact_value =
      lambda * basesys::integrate(flow.base, measure_id, flow.ceiling).numeric();
  out.residual = std::fabs(out.estimate - out.exact_value);
  return out;
}

std::optional<std::vector<Rational>> membership_bruteforce_oracle(
    const std::vector<double>& generators, double x, int num_bound, int den_bound, double eps) {
  if (num_bound < 1 || den_bound < 1) throw std::invalid_argument("bounds must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");

  // reduced fractions in (denominator, numerator) order; zero appears once
  std::vector<std::pair<Rational, double>> candidates;
  candidates.emplace_back(Rational(0), 0.0);
  for (int den = 1; den <= den_bound; ++den)
    for (int num = -num_bound; num <= num_bound; ++num) {
      if (num == 0) continue;
      if (boost::multiprecision::gcd(Integer(std::abs(num)), Integer(den)) != 1) continue;
      Rational q(num, den);
      candidates.emplace_back(q, to_double(q));
    }

  const std::size_t k = generators.size();
  std::vector<std::size_t> pick(k, 0);
  std::vector<double> partial(k + 1, 0.0);

  std::size_t level = 0;
  for (;;) {
    if (level == k) {
      if (std::fabs(partial[k] - x) < eps) {
        std::vector<Rational> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = candidates[pick[i]].first;
        return out;
      }
      // backtrack
      for (;;) {
        if (level == 0) return std::nullopt;
        --level;
        if (++pick[level] < candidates.size()) break;
      }
      for (std::size_t i = level + 1; i < k; ++i) pick[i] = 0;
    }
    partial[level + 1] = partial[level] + candidates[pick[level]].second * generators[level];
    ++level;
  }
}

double torus_conjugacy_check(const SuspensionFlow& flow, double t, int samples,
                             std::mt19937_64& rng) {
  const auto* rot = std::get_if<basesys::CircleRotation>(&flow.base.kind);
  if (!rot || !flow.ceiling.is_constant_one())
    throw suspension::AdmissibilityError(
        "conjugacy check requires the standard suspension of a circle rotation");
  double s = rot->angle.numeric();
  std::uniform_real_distribution<double> coord(0.0, 1.0);

  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    SuspensionPoint p{basesys::CircleState{coord(rng)}, coord(rng) * 0.999};
    auto lhs = suspension::torus_chart(flow, suspension::flow_by(flow, p, t));
    auto c = suspension::torus_chart(flow, p);
    worst = std::max(worst, circle_dist(lhs.first, frac(c.first + s * t)));
    worst = std::max(worst, circle_dist(lhs.second, frac(c.second + t)));
  }
  return worst;
}

}  // namespace minflow::numlab
