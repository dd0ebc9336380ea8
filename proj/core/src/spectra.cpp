#include "minflow/spectra.hpp"

#include <cmath>
#include <numbers>

namespace minflow::spectra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using suspension::CeilingFunction;

const basesys::DeclaredSystem* declared_spectra_of(const BaseSystem& system) {
  if (const auto* dec = std::get_if<basesys::DeclaredSystem>(&system.kind)) return dec;
  if (const auto* fur = std::get_if<basesys::Furstenberg>(&system.kind))
    if (fur->declared_spectra) return &*fur->declared_spectra;
  return nullptr;
}

}  // namespace

const char* provenance_label(EigenProvenance p) {
  switch (p) {
    case EigenProvenance::ConstantRescale:
      return "constant-rescale";
    case EigenProvenance::Cohomologous:
      return "cohomologous";
    case EigenProvenance::Declared:
      return "declared";
    case EigenProvenance::TwoMeasureCollapse:
      return "two-measure-trace-collapse";
  }
  return "?";
}

EigenResult suspension_eigen_group(const SuspensionFlow& flow) {
  // collapse rule: agreeing traces plus a measure-separating ceiling force a
  // trivial eigenvalue group
  if (const auto* dec = declared_spectra_of(flow.base)) {
    if (dec->traces_agree_on_k0 && dec->measures.size() >= 2) {
      try {
        bool separated = false;
        ExactReal first = basesys::integrate(flow.base, dec->measures[0].id, flow.ceiling);
        for (std::size_t i = 1; i < dec->measures.size() && !separated; ++i)
          separated =
              !(basesys::integrate(flow.base, dec->measures[i].id, flow.ceiling) == first);
        if (separated)
          return {EigenGroup{qlinear::FgSubgroup::generated_by(flow.base.basis, {}),
                             EigenProvenance::TwoMeasureCollapse,
                             "ceiling separates two invariant measures while all traces agree "
                             "on K0; the eigenvalue group collapses to {0}"},
                  ""};
      } catch (const suspension::AdmissibilityError&) {
        // ceiling not integrable against the declared measures; fall through
      }
    }
  }

  const ExactReal* constant = nullptr;
  EigenProvenance provenance = EigenProvenance::ConstantRescale;
  if (const auto* c = std::get_if<CeilingFunction::Constant>(&flow.ceiling.form())) {
    constant = &c->value;
  } else if (const auto* co =
                 std::get_if<CeilingFunction::CohomologousToConstant>(&flow.ceiling.form())) {
    constant = &co->constant;
    provenance = EigenProvenance::Cohomologous;
  }
  if (!constant)
    return {std::nullopt,
            "no catalog rule for this ceiling; the eigenvalue group of a general suspension "
            "is not finitely presented here (gather numerical evidence instead)"};

  auto lift = basesys::eigen_group_lift(flow.base);
  if (!lift.ok()) return {std::nullopt, lift.note};

  if (constant->is_rational() && constant->rational_part() == 1)
    return {EigenGroup{*lift.group, provenance, lift.note}, ""};

  auto inv = qlinear::reciprocal(*constant);
  if (!inv)
    return {std::nullopt, "reciprocal of the ceiling constant " + constant->to_string() +
                              " is not representable in the basis"};
  std::vector<ExactReal> scaled;
  scaled.reserve(lift.group->generators().size());
  for (const auto& g : lift.group->generators()) {
    auto prod = qlinear::try_mul(*inv, g);
    if (!prod)
      return {std::nullopt, "cannot form (1/" + constant->to_string() + ") * " + g.to_string() +
                                " inside the Q-span; declare a quadratic closure or rescale"};
    scaled.push_back(*prod);
  }
  return {EigenGroup{qlinear::FgSubgroup::generated_by(flow.base.basis, std::move(scaled)),
                     provenance, "base lift rescaled by 1/(" + constant->to_string() + ")"},
          ""};
}

MinimalityVerdict decide_time_map(const SuspensionFlow& flow, const ExactReal& rho) {
  if (rho.is_zero())
    throw std::domain_error(
        "rho = 0 names no finite time (the reciprocal-time query decides T^{1/rho})");

  // a non-minimal base makes the flow non-minimal, and any proper closed
  // flow-invariant set is invariant for every time map
  auto base_minimality = basesys::is_minimal_base(flow.base);
  if (!base_minimality.minimal) {
    MinimalityVerdict v;
    v.kind = MinimalityVerdict::Kind::NotMinimal;
    v.note = "the base is not minimal (" + base_minimality.note +
             "); every time map of the suspension inherits its proper closed invariant set";
    return v;
  }

  EigenResult eig = suspension_eigen_group(flow);
  if (!eig.ok()) {
    MinimalityVerdict v;
    v.kind = MinimalityVerdict::Kind::Unknown;
    v.note = eig.unknown_reason;
    return v;
  }
  const FgSubgroup& group = eig.value->group;

  auto coeffs = group.qspan().membership(rho);
  if (!coeffs) {
    MinimalityVerdict v;
    v.kind = MinimalityVerdict::Kind::Minimal;
    v.eigen_group = eig.value;
    v.note = "conditional on declared generator independence: " +
             flow.base.basis->independence_note();
    return v;
  }

  // clear denominators: rho = sum c_i g_i = (1/L) sum (L c_i) g_i
  Integer lcm = 1;
  for (const auto& c : *coeffs) lcm = boost::multiprecision::lcm(lcm, rat_den(c));
  std::vector<Integer> combination;
  combination.reserve(coeffs->size());
  for (const auto& c : *coeffs) combination.push_back(rat_num(c) * (lcm / rat_den(c)));
  ExactReal lambda = group.combine(combination);
  Rational r{Integer(1), lcm};
  if (!(qlinear::scale(lambda, r) == rho))
    throw std::logic_error("certificate extraction failed to recombine");

  MinimalityVerdict v;
  v.kind = MinimalityVerdict::Kind::NotMinimal;
  v.certificate = NotMinimalCertificate{r, std::move(lambda), std::move(combination), rho};
  v.eigen_group = eig.value;
  v.note = std::string("eigenvalue group via ") + provenance_label(eig.value->provenance);
  return v;
}

MinimalityVerdict decide_time_map_at_time(const SuspensionFlow& flow, const ExactReal& t) {
  if (t.is_zero()) {
    MinimalityVerdict v;
    v.kind = MinimalityVerdict::Kind::NotMinimal;
    v.note = "the time-zero map is the identity";
    return v;
  }
  auto rho = qlinear::reciprocal(t);
  if (!rho) {
    MinimalityVerdict v;
    v.kind = MinimalityVerdict::Kind::Unknown;
    v.note = "reciprocal of " + t.to_string() +
             " is not representable in the basis; query with rho = 1/t directly";
    return v;
  }
  return decide_time_map(flow, *rho);
}

TraceDecomposition rieffel_decomposition(const SuspensionFlow& flow, const ExactReal& t,
                                         const NotMinimalCertificate& certificate) {
  if (!flow.ceiling.is_constant_one())
    throw std::invalid_argument("trace decomposition applies to standard suspensions only");

  if (t.is_rational())
    return {t.rational_part(), Rational(0), ExactReal::zero(t.basis()), {}, t};

  if (!(qlinear::scale(certificate.lambda, certificate.r) == t))
    throw std::invalid_argument("certificate does not witness the requested time");

  EigenResult eig = suspension_eigen_group(flow);
  if (!eig.ok()) throw std::invalid_argument(eig.unknown_reason);
  const FgSubgroup& group = eig.value->group;

  Integer n = certificate.lambda.floor();
  ExactReal gamma = certificate.lambda - ExactReal::rational(t.basis(), Rational(n));
  auto gamma_cert = group.membership(gamma);
  if (!gamma_cert)
    throw std::logic_error(
        "fractional part escaped the eigenvalue group; the group must contain Z");
  if (gamma.sign() <= 0 || (gamma - ExactReal::rational(t.basis(), 1)).sign() >= 0)
    throw std::logic_error("fractional part not in (0,1) after interval refinement");

  TraceDecomposition out{certificate.r * Rational(n), certificate.r, std::move(gamma),
                         std::move(*gamma_cert), t};
  ExactReal recombined =
      ExactReal::rational(t.basis(), out.r1) + qlinear::scale(out.gamma, out.r2);
  if (!(recombined == t)) throw std::logic_error("decomposition failed to recombine");
  return out;
}

std::vector<CylinderSet> clopen_realization(const BaseSystem& odometer, const Rational& gamma,
                                            int max_depth) {
  const auto* odo = std::get_if<basesys::Odometer>(&odometer.kind);
  if (!odo) throw std::invalid_argument("clopen realization needs an odometer base");
  if (gamma < 0 || gamma > 1)
    throw std::domain_error("target measure must lie in [0, 1], got " + fraction_string(gamma));
  if (gamma == 0) return {};

  int depth = 0;
  for (int d = 1; d <= max_depth; ++d) {
    if (is_integer(gamma * Rational(basesys::odometer_level_product(*odo, d)))) {
      depth = d;
      break;
    }
  }
  if (depth == 0)
    throw std::domain_error(
        "denominator of " + fraction_string(gamma) + " does not divide the level product " +
        basesys::odometer_level_product(*odo, max_depth).str() + " at depth " +
        std::to_string(max_depth) + "; attainable measures are multiples of its reciprocal");

  std::vector<CylinderSet> out;
  std::vector<int> prefix;
  Rational remaining = gamma;
  for (int level = 1; level <= depth && remaining != 0; ++level) {
    Integer product = basesys::odometer_level_product(*odo, level);
    Rational cyl_measure{Integer(1), product};
    Integer take = floor_rational(remaining * Rational(product));
    for (Integer j = 0; j < take; ++j) {
      CylinderSet c;
      c.digits = prefix;
      c.digits.push_back(j.convert_to<int>());
      c.measure = cyl_measure;
      out.push_back(std::move(c));
    }
    remaining -= Rational(take) * cyl_measure;
    if (remaining != 0) prefix.push_back(take.convert_to<int>());
  }
  if (remaining != 0) throw std::logic_error("greedy cylinder realization failed to close");

  Rational total{0};
  for (const auto& c : out) total += c.measure;
  if (total != gamma) throw std::logic_error("cylinder measures do not sum to the target");
  return out;
}

bool TraceImage::fully_contained() const {
  return std::all_of(containment.begin(), containment.end(),
                     [](const auto& entry) { return entry.second.has_value(); });
}

TraceImage lambdaK_trace_image(const SuspensionFlow& flow, const std::string& measure_id) {
  EigenResult eig = suspension_eigen_group(flow);
  if (!eig.ok())
    throw std::invalid_argument("trace image needs a known eigenvalue group: " +
                                eig.unknown_reason);
  auto tr = basesys::trace_range(flow.base);
  if (!tr.ok()) throw std::invalid_argument("trace image needs a known trace range: " + tr.note);

  ExactReal tau = basesys::integrate(flow.base, measure_id, flow.ceiling);

  std::vector<ExactReal> scaled;
  scaled.reserve(eig.value->group.generators().size());
  for (const auto& g : eig.value->group.generators()) {
    auto prod = qlinear::try_mul(tau, g);
    if (!prod)
      throw std::invalid_argument("cannot scale eigenvalue generator " + g.to_string() +
                                  " by the mean ceiling " + tau.to_string());
    scaled.push_back(*prod);
  }

  TraceImage image{qlinear::FgSubgroup::generated_by(flow.base.basis, scaled), measure_id, tau,
                   {}};
  for (const auto& g : scaled) image.containment.emplace_back(g, tr.group->membership(g));
  return image;
}

bool mutually_contained(const FgSubgroup& a, const FgSubgroup& b) {
  for (const auto& g : a.generators())
    if (!b.membership(g)) return false;
  for (const auto& g : b.generators())
    if (!a.membership(g)) return false;
  return true;
}

double eigenvector_residual(const SuspensionFlow& flow, const ExactReal& lambda,
                            const basesys::BaseCharacter& chi_base,
                            std::span<const std::pair<SuspensionPoint, double>> samples) {
  const double lam = lambda.numeric();
  auto lifted = [&](const SuspensionPoint& p) {
    return std::polar(1.0, kTwoPi * lam * p.height) * chi_base.eval(flow.base, p.base);
  };
  double worst = 0.0;
  for (const auto& [point, t] : samples) {
    auto lhs = lifted(suspension::flow_by(flow, point, t));
    auto rhs = std::polar(1.0, kTwoPi * lam * t) * lifted(point);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

SchwartzmanResult schwartzman_positive(const SuspensionFlow& flow, const ExactReal& lambda) {
  int lambda_sign = lambda.sign();
  if (lambda_sign < 0)
    throw std::domain_error("positivity test expects lambda >= 0 (cones are one-sided)");

  SchwartzmanResult result;
  result.overall = lambda_sign > 0;
  for (const auto& id : basesys::measure_ids(flow.base)) {
    ExactReal tau = basesys::integrate(flow.base, id, flow.ceiling);
    SchwartzmanEntry entry;
    entry.measure_id = id;
    entry.value = qlinear::try_mul(lambda, tau);
    entry.positive = lambda_sign > 0 && tau.sign() > 0;
    result.overall = result.overall && entry.positive;
    result.per_measure.push_back(std::move(entry));
  }
  return result;
}

}  // namespace minflow::spectra
