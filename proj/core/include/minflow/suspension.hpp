#pragma once

// The suspension-flow construction over a catalog base: ceiling functions, the
// orbit cocycle, canonical fundamental-domain points, the R-action and its
// time-t maps.
//
// Heights are numeric (double) and evidence-grade; exact spectral verdicts
// never consume them.

#include "minflow/basesys.hpp"

#include <optional>
#include <variant>

namespace minflow::suspension {

using basesys::BaseState;
using basesys::BaseSystem;
using basesys::TrigTerm;
using qlinear::ExactReal;

class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FlowBudgetError : public std::runtime_error {
 public:
  FlowBudgetError(std::string msg, long long partial)
      : std::runtime_error(std::move(msg)), partial_steps(partial) {}
  long long partial_steps;
};

/// Strictly positive ceiling over a base system. Positivity is enforced by a
/// per-variant sufficient condition at validation time.
class CeilingFunction {
 public:
  struct Constant {
    ExactReal value;
  };
  struct TrigPoly {
    Rational constant;
    std::vector<TrigTerm> terms;
  };
  // rational value per depth-d cylinder, indexed by the mixed-radix counter
  struct CylinderValues {
    int depth = 1;
    std::vector<Rational> values;
  };
  // f = c + g(Sx) - g(x); integrates to c against every invariant measure
  struct CohomologousToConstant {
    ExactReal constant;
    std::vector<TrigTerm> transfer;
  };
  // integral declared per measure on a DeclaredSystem; no pointwise evaluator
  struct DeclaredFn {
    std::string fn_id;
  };

  using Form = std::variant<Constant, TrigPoly, CylinderValues, CohomologousToConstant, DeclaredFn>;

  explicit CeilingFunction(Form form) : form_(std::move(form)) {}

  const Form& form() const { return form_; }
  bool is_constant() const { return std::holds_alternative<Constant>(form_); }
  bool is_constant_one() const;

  /// Numeric pointwise value. Throws AdmissibilityError for declared-integral
  /// ceilings or a state/ceiling mismatch.
  double eval(const BaseSystem& system, const BaseState& x) const;

  /// Checks the variant's sufficient positivity condition against `system`
  /// (constant sign by enclosure, trig dominance, cylinder values, sampled
  /// minimum for cohomologous transfers). Throws AdmissibilityError.
  void validate_positive(const BaseSystem& system) const;

 private:
  Form form_;
};

struct SuspensionFlow {
  BaseSystem base;
  CeilingFunction ceiling;
};

/// Canonical representative: 0 <= height < f(base).
struct SuspensionPoint {
  BaseState base;
  double height = 0.0;
};

/// Birkhoff sum of the ceiling along the base orbit, with the usual sign
/// convention: 0 at n = 0, -sum over the backward orbit for n < 0.
double cocycle_alpha(const SuspensionFlow& flow, const BaseState& x, long long n);

/// Exact cocycle value where the arithmetic allows it: constant ceilings, and
/// cylinder ceilings over (exact) odometer states.
std::optional<ExactReal> cocycle_alpha_exact(const SuspensionFlow& flow, const BaseState& x,
                                             long long n);

/// Wraps (base, height) into the fundamental domain.
SuspensionPoint normalize(const SuspensionFlow& flow, BaseState base, double height);

/// The R-action: [x, s] -> [x, s + t], returned in canonical form. Constant
/// ceilings wrap in closed form; general ceilings walk the orbit
/// incrementally (budgeted; throws FlowBudgetError with the partial count).
SuspensionPoint flow_by(const SuspensionFlow& flow, const SuspensionPoint& p, double t);

/// Discrete-system view of the time-t map, suitable for orbit drivers.
struct TimeMap {
  const SuspensionFlow* flow = nullptr;
  double t = 0.0;
  SuspensionPoint step(const SuspensionPoint& p) const { return flow_by(*flow, p, t); }
};
inline TimeMap time_map(const SuspensionFlow& flow, double t) { return {&flow, t}; }

/// Conjugacy chart onto the 2-torus for standard suspensions of circle
/// rotations: [x, h] -> (x + s h, h) in additive coordinates. Throws
/// AdmissibilityError for any other flow.
std::pair<double, double> torus_chart(const SuspensionFlow& flow, const SuspensionPoint& p);

/// Names the ceiling classes a base system admits (used in diagnostics).
const char* admissible_ceiling_classes(const BaseSystem& system);

}  // namespace minflow::suspension

namespace minflow::basesys {

/// Exact integral of an admissible ceiling against a catalog measure:
/// trig polynomials integrate to their constant term, cylinder ceilings to the
/// measure-weighted sum, declared ceilings to their declared values.
ExactReal integrate(const BaseSystem& system, const std::string& measure_id,
                    const suspension::CeilingFunction& f);

}  // namespace minflow::basesys
