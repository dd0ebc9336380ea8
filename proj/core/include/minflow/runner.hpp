#pragma once

#include "minflow/config.hpp"

#include <string>
#include <vector>

namespace minflow::cli {

struct RunOutcome {
  int exit_code = 0;       // 0: all queries executed; 1: runtime failure
  bool any_unknown = false;
  std::string report_json;
  std::vector<std::pair<std::string, std::string>> csv_files;  // (name, content)
};

/// Executes the queries in order (fanning out across threads when asked; the
/// report is assembled in query order either way) and builds the report
/// document. Deterministic for a fixed config and seed, up to wall-clock
/// fields.
RunOutcome run(const RunConfig& config);

/// Writes report.json and the CSV series under out_dir (created if needed).
void write_outcome(const RunOutcome& outcome, const std::string& out_dir);

}  // namespace minflow::cli
