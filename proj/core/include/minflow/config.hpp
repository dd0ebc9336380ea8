#pragma once

// Run configuration: a declared generator basis, named systems and ceilings,
// and an ordered query list. Exact rationals travel as "p/q" strings; exact
// reals as literals over the declared generator names ("3/2 + 2*sqrt2").

#include "minflow/numlab.hpp"
#include "minflow/spectra.hpp"

#include <cstdint>

namespace minflow::cli {

/// Configuration parse/validation failure (CLI exit code 2). Messages carry
/// the offending field path and name.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Query {
  std::string id;
  std::string op;  // decide | eigens | lambdak | decompose | realize-clopen |
                   // simulate | detect | cycle | conjugacy-check
  std::string system;
  std::string ceiling;
  std::string measure;

  std::optional<qlinear::ExactReal> rho;           // decide
  std::optional<qlinear::ExactReal> time_exact;    // decide (wrapper), decompose
  std::optional<qlinear::ExactReal> lambda_exact;  // detect, cycle
  std::optional<Rational> gamma;                   // realize-clopen
  std::optional<double> time_numeric;              // simulate, conjugacy-check

  long long steps = 100000;
  int grid_x = 64;
  int grid_y = 64;
  int test_order = 8;
  int samples = 10000;
  int max_depth = 16;
};

struct RunConfig {
  qlinear::BasisPtr basis;
  std::vector<basesys::BaseSystem> systems;
  std::vector<std::pair<std::string, suspension::CeilingFunction>> ceilings;
  std::vector<Query> queries;
  std::uint64_t seed = 0;
  int threads = 1;
  numlab::DetectorThresholds detector_thresholds{};

  const basesys::BaseSystem* find_system(const std::string& name) const;
  const suspension::CeilingFunction* find_ceiling(const std::string& name) const;
};

/// Parses and validates a configuration document. All referenced names must
/// resolve and every query must carry the parameters its op needs.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Human-readable catalog of supported kinds, ceilings and query ops.
std::string catalog_text();

}  // namespace minflow::cli
