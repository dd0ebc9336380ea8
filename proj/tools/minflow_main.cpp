// Batch front end: executes query configurations, re-checks emitted
// certificates, and lists the catalog.
//
// Exit codes: 0 all queries executed (Unknown verdicts flagged in the
// report), 1 runtime failure, 2 configuration errors.

#include "minflow/config.hpp"
#include "minflow/report.hpp"
#include "minflow/runner.hpp"

#include <iostream>

#include "CLI11.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<int> threads) {
  minflow::cli::RunConfig config;
  try {
    config = minflow::cli::load_config_file(config_path);
  } catch (const minflow::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed) config.seed = *seed;
  if (threads) config.threads = *threads;

  auto outcome = minflow::cli::run(config);
  minflow::cli::write_outcome(outcome, out_dir);
  std::cout << "report: " << out_dir << "/report.json ("
            << config.queries.size() << " queries";
  if (outcome.any_unknown) std::cout << ", some verdicts unknown";
  std::cout << ")\n";
  if (outcome.exit_code != 0) std::cerr << "one or more queries failed; see the report\n";
  return outcome.exit_code;
}

int verify_command(const std::string& report_path) {
  auto result = minflow::cli::verify_report_file(report_path);
  std::cout << "records: " << result.records_seen
            << ", certificates checked: " << result.certificates_checked << "\n";
  for (const auto& f : result.failures) std::cerr << "FAIL " << f << "\n";
  if (result.ok) {
    std::cout << "all certificates recombine exactly\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"suspension-flow spectra toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  auto* run = app.add_subcommand("run", "execute a query configuration");
  run->add_option("--config", config_path, "configuration file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory for report.json and CSV series");
  run->add_option("--seed", seed, "override the configured RNG seed");
  run->add_option("--threads", threads, "query fan-out width (affects speed only)");

  std::string report_path;
  auto* verify = app.add_subcommand("verify-report", "recombine certificates in a report");
  verify->add_option("report", report_path, "report.json produced by run")->required();

  auto* catalog = app.add_subcommand("list-catalog", "list systems, ceilings and query ops");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(config_path, out_dir, seed, threads);
  if (verify->parsed()) return verify_command(report_path);
  if (catalog->parsed()) {
    std::cout << minflow::cli::catalog_text();
    return 0;
  }
  return 0;
}
