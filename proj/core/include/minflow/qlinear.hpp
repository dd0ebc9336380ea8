#pragma once

// Exact arithmetic in the Q-vector space spanned by 1 and a finite list of
// declared-independent irrational generators. Every symbolic verdict produced
// by the toolkit flows through the types in this header.
//
// Independence of {1, g_1, ..., g_k} over Q is a *declared axiom*, recorded in
// the basis' independence note; equality of ExactReals is coefficientwise and
// is only as sound as that declaration.

#include "minflow/rational.hpp"

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minflow::qlinear {

enum class RefinerKind {
  SqrtInt,         // g = sqrt(n) for an integer n >= 2; bisection refiner
  DecimalLiteral,  // finite decimal expansion revealed digit by digit
  Opaque,          // no refinement beyond the declared enclosure
};

struct GeneratorSpec {
  std::string name;
  Interval enclosure;  // declared initial enclosure, lo < hi
  RefinerKind refiner = RefinerKind::Opaque;
  Integer sqrt_arg = 0;         // SqrtInt: the radicand
  std::string decimal_digits;   // DecimalLiteral: e.g. "1.7320508075688772"
  bool quadratic_closure = false;  // reciprocals of a + b*g stay representable
};

/// Thrown when a refiner cannot tighten an enclosure to the requested width.
/// Carries the best interval obtained so far.
class RefinementError : public std::runtime_error {
 public:
  RefinementError(std::string msg, Interval best)
      : std::runtime_error(std::move(msg)), best_interval(std::move(best)) {}
  Interval best_interval;
};

class BasisMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivisionByZeroError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Ordered list of named irrational generators with refinable rational
/// enclosures. Enclosure refinement mutates an internal cache; the cache is
/// mutex-guarded so read paths stay safe under concurrent queries.
class GeneratorBasis {
 public:
  static std::shared_ptr<const GeneratorBasis> create(
      std::vector<GeneratorSpec> generators, std::string independence_note);

  std::size_t generator_count() const { return generators_.size(); }
  std::size_t dimension() const { return generators_.size() + 1; }
  const GeneratorSpec& generator(std::size_t i) const { return generators_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::string& independence_note() const { return independence_note_; }
  const std::string& id() const { return id_; }

  /// Current enclosure after refining until width <= target_width.
  /// Throws RefinementError when the refiner cannot reach the target.
  Interval refined_enclosure(std::size_t i, const Rational& target_width) const;
  Interval current_enclosure(std::size_t i) const;

 private:
  explicit GeneratorBasis(std::vector<GeneratorSpec> generators,
                          std::string independence_note);

  std::vector<GeneratorSpec> generators_;
  std::string independence_note_;
  std::string id_;

  mutable std::mutex cache_mutex_;
  mutable std::vector<Interval> cache_;
  mutable std::vector<std::size_t> decimal_consumed_;
};

using BasisPtr = std::shared_ptr<const GeneratorBasis>;

/// q_0 + sum_i q_i * g_i with exact rational coefficients over a shared basis.
/// Equality is coefficientwise (exact under the declared independence).
class ExactReal {
 public:
  ExactReal(BasisPtr basis, std::vector<Rational> coeffs);

  static ExactReal rational(BasisPtr basis, Rational q);
  static ExactReal zero(BasisPtr basis);
  static ExactReal generator(BasisPtr basis, std::size_t index);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Rational& rational_part() const { return coeffs_[0]; }
  const Rational& coeff(std::size_t i) const { return coeffs_.at(i); }

  bool is_zero() const;
  bool is_rational() const;

  ExactReal operator-() const;
  friend ExactReal operator+(const ExactReal& a, const ExactReal& b);
  friend ExactReal operator-(const ExactReal& a, const ExactReal& b);
  friend bool operator==(const ExactReal& a, const ExactReal& b);

  /// Interval of width <= eps containing the value; refines generator
  /// enclosures as needed. eps > 0.
  Interval approx(const Rational& eps) const;

  /// Best-effort double value (midpoint of the tightest enclosure the
  /// refiners can reach, capped near full double precision). Evidence-grade
  /// only; never feeds a symbolic verdict.
  double numeric() const;

  /// Exact sign (-1, 0, +1). Refines until the enclosure excludes zero;
  /// terminates for any value that is nonzero under declared independence.
  int sign() const;

  /// Exact floor; uses interval bisection for irrational values.
  Integer floor() const;

  std::string to_string() const;

 private:
  // memoized numeric value, shared across copies (value is a pure function of
  // the coefficients; the first evaluation wins)
  struct NumericCache {
    std::atomic<bool> ready{false};
    std::atomic<double> value{0.0};
  };

  BasisPtr basis_;
  std::vector<Rational> coeffs_;  // size = basis dimension
  std::shared_ptr<NumericCache> numeric_cache_;
};

ExactReal scale(const ExactReal& a, const Rational& c);

/// Product, when it stays inside the Q-span: one factor rational, or both
/// supported on the same quadratic-closed generator.
std::optional<ExactReal> try_mul(const ExactReal& a, const ExactReal& b);

/// 1/a for rationals and for a + b*g over a quadratic-closed generator g.
/// Returns nullopt when the reciprocal escapes the span; throws
/// DivisionByZeroError for a = 0.
std::optional<ExactReal> reciprocal(const ExactReal& a);

/// Parses "3/2 + 2*sqrt2 - 1/3*g" style literals against basis generator
/// names. nullopt on malformed input or unknown names.
std::optional<ExactReal> parse_exact_real(const BasisPtr& basis, std::string_view text);

/// Q-linear subspace of R presented by a canonical reduced-row-echelon basis
/// over the generator coordinates, remembering the originating generators.
class QSubspace {
 public:
  static QSubspace span_of(BasisPtr basis, std::vector<ExactReal> generators);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<std::vector<Rational>>& basis_matrix() const { return rref_; }
  std::size_t rank() const { return rref_.size(); }
  const std::vector<ExactReal>& originating_generators() const { return origin_; }

  /// Exact membership. Some(c) reconstructs x as sum c_i * origin_i; free
  /// coordinates resolve to zero (ties break by column order).
  std::optional<std::vector<Rational>> membership(const ExactReal& x) const;
  bool contains(const ExactReal& x) const { return membership(x).has_value(); }

 private:
  BasisPtr basis_;
  std::vector<ExactReal> origin_;
  std::vector<std::vector<Rational>> rref_;
};

/// Finitely generated subgroup of R: integer combinations of the generators.
class FgSubgroup {
 public:
  static FgSubgroup generated_by(BasisPtr basis, std::vector<ExactReal> generators);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<ExactReal>& generators() const { return generators_; }
  bool is_trivial() const;  // only the zero element

  /// Integer-certificate membership: Some(n) iff x = sum n_i * gen_i with all
  /// n_i integers. Rational-only solutions yield None.
  std::optional<std::vector<Integer>> membership(const ExactReal& x) const;

  /// Recombines an integer certificate into the element it certifies.
  ExactReal combine(const std::vector<Integer>& coefficients) const;

  /// Cached Q-span of the generators.
  const QSubspace& qspan() const { return *qspan_; }

 private:
  BasisPtr basis_;
  std::vector<ExactReal> generators_;
  std::shared_ptr<const QSubspace> qspan_;
};

// Operation-style spellings used throughout the spectral layer.
inline std::optional<std::vector<Rational>> qspan_membership(const QSubspace& v,
                                                             const ExactReal& x) {
  return v.membership(x);
}
inline std::optional<std::vector<Integer>> subgroup_membership(const FgSubgroup& g,
                                                               const ExactReal& x) {
  return g.membership(x);
}
inline QSubspace qspan_of(const FgSubgroup& g) { return g.qspan(); }

/// Scales every generator: c * G. Exact.
FgSubgroup scale_subgroup(const FgSubgroup& g, const Rational& c);

}  // namespace minflow::qlinear
