#pragma once

// Report emission and the independent certificate checker. Certificates are
// serialized as exact "p/q" strings and recombined here with plain rational
// vector arithmetic, never through the decision path that produced them.

#include "minflow/rational.hpp"

#include <string>
#include <vector>

namespace minflow::cli {

/// CSV with a "checkpoint,value" header, UTF-8, newline-terminated rows.
std::string emit_csv(const std::vector<std::pair<std::string, std::string>>& series);
std::vector<std::pair<std::string, std::string>> parse_csv(const std::string& text);

struct VerifyResult {
  bool ok = true;
  int records_seen = 0;
  int certificates_checked = 0;
  std::vector<std::string> failures;
};

/// Recombines every NotMinimal certificate in a report document:
/// lambda = sum n_i * generator_i and rho = r * lambda, coefficientwise and
/// exact. Also re-checks decomposition and clopen-sum identities.
VerifyResult verify_report_text(const std::string& report_json);
VerifyResult verify_report_file(const std::string& path);

}  // namespace minflow::cli
