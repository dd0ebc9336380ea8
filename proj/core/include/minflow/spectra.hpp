#pragma once

// Exact spectral engine: eigenvalue groups of suspension flows, the
// minimality decider for time-t maps with machine-checkable certificates, the
// trace correspondence onto K-theory data, trace-value decompositions, clopen
// realizations on odometers, and positivity tests for asymptotic cycles.
//
// Guiding identity: for a minimal suspension flow, the reciprocal times t with
// a non-minimal time-1/t map form exactly the Q-span of the eigenvalue group.
// NotMinimal verdicts therefore carry an exact factorization rho = r * lambda
// with lambda certified inside the eigenvalue group; Minimal verdicts are
// conditional on the declared independence of the generator basis.

#include "minflow/suspension.hpp"

#include <complex>
#include <span>

namespace minflow::spectra {

using basesys::BaseSystem;
using qlinear::ExactReal;
using qlinear::FgSubgroup;
using suspension::SuspensionFlow;
using suspension::SuspensionPoint;

enum class EigenProvenance { ConstantRescale, Cohomologous, Declared, TwoMeasureCollapse };

const char* provenance_label(EigenProvenance p);

struct EigenGroup {
  FgSubgroup group;
  EigenProvenance provenance;
  std::string note;
};

struct EigenResult {
  std::optional<EigenGroup> value;
  std::string unknown_reason;
  bool ok() const { return value.has_value(); }
};

/// Eigenvalue group of the suspension flow, when the catalog rules apply:
/// constant ceilings rescale the base lift by 1/c, cohomologous ceilings
/// reduce to their constant, and declared systems with agreeing traces and a
/// measure-separating ceiling collapse to {0}. Everything else is Unknown.
EigenResult suspension_eigen_group(const SuspensionFlow& flow);

struct NotMinimalCertificate {
  Rational r;  // nonzero
  ExactReal lambda;
  std::vector<Integer> lambda_combination;  // integer coefficients over the group generators
  ExactReal rho;                            // = r * lambda, exactly
};

struct MinimalityVerdict {
  enum class Kind { Minimal, NotMinimal, Unknown } kind = Kind::Unknown;
  std::optional<NotMinimalCertificate> certificate;  // NotMinimal (absent for time-zero)
  std::optional<EigenGroup> eigen_group;
  std::string note;

  bool minimal() const { return kind == Kind::Minimal; }
  bool not_minimal() const { return kind == Kind::NotMinimal; }
  bool unknown() const { return kind == Kind::Unknown; }
};

/// Decides minimality of the time-1/rho map. rho = 0 is a domain error (it
/// names no finite time). NotMinimal comes with an exact certificate; Minimal
/// is conditional on declared independence; an Unknown eigenvalue group turns
/// into an Unknown verdict.
MinimalityVerdict decide_time_map(const SuspensionFlow& flow, const ExactReal& rho);

/// Convenience wrapper consuming the time t itself. t = 0 is the identity map
/// (NotMinimal, no certificate); irrational t outside every representable
/// reciprocal yields Unknown with instructions to pass rho directly.
MinimalityVerdict decide_time_map_at_time(const SuspensionFlow& flow, const ExactReal& t);

/// t = r1 + r2 * gamma with gamma in the eigenvalue group and 0 < gamma < 1
/// (trivial branch gamma = 0 for rational t). Exact recombination.
struct TraceDecomposition {
  Rational r1;
  Rational r2;
  ExactReal gamma;
  std::vector<Integer> gamma_combination;  // certificate of gamma in the group
  ExactReal target;
};

/// Splits a certified non-minimal reciprocal time over a standard suspension
/// into integral and fractional parts of its eigenvalue witness.
TraceDecomposition rieffel_decomposition(const SuspensionFlow& flow, const ExactReal& t,
                                         const NotMinimalCertificate& certificate);

struct CylinderSet {
  std::vector<int> digits;  // cylinder prefix
  Rational measure;
};

/// Disjoint cylinders of depth <= max_depth whose exact measures sum to gamma
/// (greedy most-significant-digit construction; empty for gamma = 0). Errors
/// name the attainable denominator lattice.
std::vector<CylinderSet> clopen_realization(const BaseSystem& odometer, const Rational& gamma,
                                            int max_depth = 16);

/// Image of the eigenvalue-group side of the trace correspondence: the
/// subgroup tau_mu(f) * Lambda inside R, with a memberwise containment
/// certificate against the trace range.
struct TraceImage {
  FgSubgroup subgroup;
  std::string measure_id;
  ExactReal mean_ceiling;  // tau_mu(f)
  // one entry per subgroup generator: integer certificate in the trace range,
  // when it exists
  std::vector<std::pair<ExactReal, std::optional<std::vector<Integer>>>> containment;
  bool fully_contained() const;
};

TraceImage lambdaK_trace_image(const SuspensionFlow& flow, const std::string& measure_id);

/// Mutual memberwise inclusion of two subgroups (exact certificates).
bool mutually_contained(const FgSubgroup& a, const FgSubgroup& b);

/// Max residual of the eigenvector lift chi~([x,s]) = e^{2 pi i s lambda}
/// chi(x) over the given (point, time) samples.
double eigenvector_residual(const SuspensionFlow& flow, const ExactReal& lambda,
                            const basesys::BaseCharacter& chi_base,
                            std::span<const std::pair<SuspensionPoint, double>> samples);

struct SchwartzmanEntry {
  std::string measure_id;
  std::optional<ExactReal> value;  // lambda * integral(f), when representable
  bool positive = false;
};

struct SchwartzmanResult {
  std::vector<SchwartzmanEntry> per_measure;
  bool overall = false;  // strictly positive for every measure and lambda != 0
};

/// Positivity of the winding data lambda * integral_f against every catalog
/// measure (the positive-cone test for asymptotic cycles).
SchwartzmanResult schwartzman_positive(const SuspensionFlow& flow, const ExactReal& lambda);

}  // namespace minflow::spectra
