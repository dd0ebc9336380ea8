#pragma once

// Catalog of concrete minimal base systems: dynamics, invariant-measure
// integrators, eigenvalue data and crossed-product trace ranges.
//
// Symbolic data (eigenvalue lifts, trace ranges) is exact; orbit states are
// numeric except for odometers, whose digit dynamics are exact.

#include "minflow/qlinear.hpp"

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace minflow::basesys {

using qlinear::BasisPtr;
using qlinear::ExactReal;
using qlinear::FgSubgroup;

struct TrigTerm {
  int k1 = 0;  // frequency along the first circle coordinate
  int k2 = 0;  // second coordinate (torus only)
  Rational cos_coeff{0};
  Rational sin_coeff{0};
};

struct PointSystem {};

struct CircleRotation {
  ExactReal angle;  // irrational by declaration
};

struct TorusTranslation {
  ExactReal s1;
  ExactReal s2;
};

// Digit bounds repeat periodically: bound(i) = digits[i % digits.size()].
// group_depth fixes the finite truncation used for the (not finitely
// generated) rational eigenvalue/trace groups: generator 1/(n_1...n_d).
struct Odometer {
  std::vector<int> digits;
  int group_depth = 0;  // 0 -> digits.size()
};

// Represented by the rotation factor plus side tags on finitely many marker
// orbits; orbits delegate to the factor numerically.
struct Denjoy {
  ExactReal rotation;
  std::vector<ExactReal> markers;
};

struct DeclaredMeasure {
  std::string id;
  std::vector<std::pair<std::string, ExactReal>> values;  // declared fn id -> exact integral
};

struct DeclaredSystem {
  FgSubgroup eigen_lift;
  FgSubgroup trace_range;
  bool traces_agree_on_k0 = false;
  bool minimal = true;
  std::vector<DeclaredMeasure> measures;
};

// Inverse of (x1, x2) -> (x1 + theta, x2 + twist*x1 + xi(x1)) on the 2-torus.
struct Furstenberg {
  ExactReal theta;
  int twist = 1;
  std::vector<TrigTerm> xi;
  std::optional<DeclaredSystem> declared_spectra;
};

struct BaseSystem {
  std::string name;
  BasisPtr basis;
  std::variant<PointSystem, CircleRotation, TorusTranslation, Odometer, Denjoy, Furstenberg,
               DeclaredSystem>
      kind;
};

// --- states -----------------------------------------------------------------

struct PointState {};
struct CircleState {
  double x = 0.0;  // in [0,1)
};
struct TorusState {
  double x1 = 0.0;
  double x2 = 0.0;
};

enum class OdoTail { Zeros, Maxes };

// Finite explicit window plus an implicit constant tail; carries/borrows
// materialize digits on demand.
struct OdometerState {
  std::vector<int> window;
  OdoTail tail = OdoTail::Zeros;
};
bool operator==(const OdometerState& a, const OdometerState& b);

enum class Side { None, Minus, Plus };
struct DenjoyState {
  double x = 0.0;
  Side side = Side::None;
};

using BaseState = std::variant<PointState, CircleState, TorusState, OdometerState, DenjoyState>;

// --- operations ---------------------------------------------------------------

class UnsupportedOperation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical start state (zero coordinates / all-zero digits).
BaseState initial_state(const BaseSystem& system);

/// n-fold application of the homeomorphism (inverse for n < 0).
BaseState step(const BaseSystem& system, const BaseState& x, long long n);

/// Result of a group-valued catalog query; absent group means "declare it".
struct GroupResult {
  std::optional<FgSubgroup> group;
  std::string note;
  bool ok() const { return group.has_value(); }
};

/// The lift phi^{-1}(eigenvalues of the base) = eigenvalue group of the
/// standard suspension.
GroupResult eigen_group_lift(const BaseSystem& system);

/// Range of the invariant-measure trace on K0 of the crossed product.
GroupResult trace_range(const BaseSystem& system);

struct BaseMinimality {
  bool minimal = false;
  std::string note;
  // set for torus dependence: rational coefficients expressing the dependent
  // translation coordinate in the span of the remaining ones
  std::optional<std::vector<Rational>> dependence;
};
BaseMinimality is_minimal_base(const BaseSystem& system);

/// Collapse map onto the rotation factor; drops the side tag.
double denjoy_factor(const DenjoyState& x);

std::vector<std::string> measure_ids(const BaseSystem& system);

// --- odometer helpers ---------------------------------------------------------

int odometer_digit_bound(const Odometer& odo, std::size_t index);
int odometer_group_depth(const Odometer& odo);
/// Product n_1 ... n_depth.
Integer odometer_level_product(const Odometer& odo, int depth);
/// Counter value of the first `depth` digits: sum digit_i * prod_{j<i} n_j.
Integer odometer_counter(const Odometer& odo, const OdometerState& x, int depth);
int odometer_digit(const Odometer& odo, const OdometerState& x, std::size_t index);

// --- characters ----------------------------------------------------------------

/// Continuous character of a base system, used for eigenvector lifts and the
/// Weyl detector test families.
struct BaseCharacter {
  enum class Kind { Trivial, Circle, Torus, OdometerCylinder } kind = Kind::Trivial;
  int k1 = 0;
  int k2 = 0;
  Rational phase_per_count{0};  // odometer: chi = exp(2 pi i * phase * counter)
  int depth = 0;
  std::string label;

  std::complex<double> eval(const BaseSystem& system, const BaseState& x) const;
};

/// Catalog character whose base eigenvalue matches the lift lambda
/// (rotation: lambda = a + b s -> index b; odometer: rational lambda with
/// compatible denominator). nullopt when the catalog has none.
std::optional<BaseCharacter> base_character_for(const BaseSystem& system,
                                                const ExactReal& lambda);

double eval_trig(const std::vector<TrigTerm>& terms, double x1, double x2 = 0.0);

}  // namespace minflow::basesys
