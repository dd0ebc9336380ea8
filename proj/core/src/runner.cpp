#include "minflow/runner.hpp"

#include "minflow/report.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace minflow::cli {

namespace {

using nlohmann::json;
using qlinear::ExactReal;
using suspension::SuspensionFlow;

json coeff_vector(const ExactReal& x) {
  json arr = json::array();
  for (const auto& q : x.coeffs()) arr.push_back(fraction_string(q));
  return arr;
}

json integer_vector(const std::vector<Integer>& v) {
  json arr = json::array();
  for (const auto& n : v) arr.push_back(n.str());
  return arr;
}

json group_json(const qlinear::FgSubgroup& g) {
  json out;
  out["generators"] = json::array();
  out["generators_text"] = json::array();
  for (const auto& gen : g.generators()) {
    out["generators"].push_back(coeff_vector(gen));
    out["generators_text"].push_back(gen.to_string());
  }
  return out;
}

std::string double_string(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

json verdict_json(const spectra::MinimalityVerdict& v) {
  json rec;
  switch (v.kind) {
    case spectra::MinimalityVerdict::Kind::Minimal:
      rec["verdict"] = "minimal";
      rec["conditional_on_independence"] = true;
      break;
    case spectra::MinimalityVerdict::Kind::NotMinimal:
      rec["verdict"] = "not-minimal";
      break;
    case spectra::MinimalityVerdict::Kind::Unknown:
      rec["verdict"] = "unknown";
      break;
  }
  rec["note"] = v.note;
  if (v.eigen_group) {
    rec["eigen_provenance"] = spectra::provenance_label(v.eigen_group->provenance);
    rec["eigen_group"] = group_json(v.eigen_group->group);
  }
  if (v.certificate) {
    json cert;
    cert["r"] = fraction_string(v.certificate->r);
    cert["lambda"] = coeff_vector(v.certificate->lambda);
    cert["lambda_text"] = v.certificate->lambda.to_string();
    cert["lambda_combination"] = integer_vector(v.certificate->lambda_combination);
    if (v.eigen_group) cert["group_generators"] = group_json(v.eigen_group->group)["generators"];
    rec["certificate"] = std::move(cert);
    rec["rho"] = coeff_vector(v.certificate->rho);
    rec["rho_text"] = v.certificate->rho.to_string();
  }
  return rec;
}

suspension::SuspensionPoint random_start(const SuspensionFlow& flow, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  basesys::BaseState base = basesys::initial_state(flow.base);
  if (auto* cs = std::get_if<basesys::CircleState>(&base)) cs->x = u01(rng);
  if (auto* ds = std::get_if<basesys::DenjoyState>(&base)) ds->x = u01(rng);
  if (auto* ts = std::get_if<basesys::TorusState>(&base)) {
    ts->x1 = u01(rng);
    ts->x2 = u01(rng);
  }
  double f = flow.ceiling.eval(flow.base, base);
  return {base, u01(rng) * f * 0.999};
}

struct QueryRuntime {
  const RunConfig* config;
  std::vector<json> records;
  std::vector<std::vector<std::pair<std::string, std::string>>> csvs;
  std::atomic<bool> failed{false};
  std::atomic<bool> unknown{false};
};

void execute_query(QueryRuntime& rt, std::size_t index) {
  const RunConfig& cfg = *rt.config;
  const Query& q = cfg.queries[index];
  json rec;
  rec["id"] = q.id;
  rec["op"] = q.op;
  if (!q.system.empty()) rec["system"] = q.system;
  if (!q.ceiling.empty()) rec["ceiling"] = q.ceiling;
  std::uint64_t derived_seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  rec["derived_seed"] = derived_seed;
  std::mt19937_64 rng(derived_seed);

  auto t0 = std::chrono::steady_clock::now();
  try {
    const basesys::BaseSystem* system = q.system.empty() ? nullptr : cfg.find_system(q.system);
    const suspension::CeilingFunction* ceiling =
        q.ceiling.empty() ? nullptr : cfg.find_ceiling(q.ceiling);
    auto make_flow = [&]() {
      SuspensionFlow flow{*system, *ceiling};
      flow.ceiling.validate_positive(flow.base);
      return flow;
    };

    if (q.op == "decide") {
      SuspensionFlow flow = make_flow();
      auto verdict = q.rho ? spectra::decide_time_map(flow, *q.rho)
                           : spectra::decide_time_map_at_time(flow, *q.time_exact);
      if (q.rho) {
        rec["rho"] = coeff_vector(*q.rho);
        rec["rho_text"] = q.rho->to_string();
      } else {
        rec["t_text"] = q.time_exact->to_string();
      }
      json v = verdict_json(verdict);
      rec.update(v);
      rec["independence_note"] = cfg.basis->independence_note();
      if (verdict.unknown()) {
        rt.unknown = true;
        rec["evidence_hint"] =
            "no exact rule applies; run simulate/detect queries on this flow for evidence";
      }
    } else if (q.op == "eigens") {
      SuspensionFlow flow = make_flow();
      auto eig = spectra::suspension_eigen_group(flow);
      if (eig.ok()) {
        rec["eigen_group"] = group_json(eig.value->group);
        rec["eigen_provenance"] = spectra::provenance_label(eig.value->provenance);
        rec["note"] = eig.value->note;
      } else {
        rec["verdict"] = "unknown";
        rec["note"] = eig.unknown_reason;
        rt.unknown = true;
      }
    } else if (q.op == "lambdak") {
      SuspensionFlow flow = make_flow();
      auto image = spectra::lambdaK_trace_image(flow, q.measure);
      rec["measure"] = q.measure;
      rec["mean_ceiling"] = coeff_vector(image.mean_ceiling);
      rec["mean_ceiling_text"] = image.mean_ceiling.to_string();
      rec["subgroup"] = group_json(image.subgroup);
      rec["fully_contained"] = image.fully_contained();
      json entries = json::array();
      for (const auto& [gen, cert] : image.containment) {
        json e;
        e["generator"] = coeff_vector(gen);
        e["member"] = cert.has_value();
        if (cert) e["combination"] = integer_vector(*cert);
        entries.push_back(std::move(e));
      }
      rec["containment"] = std::move(entries);
    } else if (q.op == "decompose") {
      SuspensionFlow flow{*system,
                          suspension::CeilingFunction{suspension::CeilingFunction::Constant{
                              ExactReal::rational(cfg.basis, 1)}}};
      auto verdict = spectra::decide_time_map(flow, *q.time_exact);
      if (!verdict.not_minimal() || !verdict.certificate)
        throw std::runtime_error("time " + q.time_exact->to_string() +
                                 " is not in the Q-span of the eigenvalue group");
      auto dec = spectra::rieffel_decomposition(flow, *q.time_exact, *verdict.certificate);
      json d;
      d["r1"] = fraction_string(dec.r1);
      d["r2"] = fraction_string(dec.r2);
      d["gamma"] = coeff_vector(dec.gamma);
      d["gamma_text"] = dec.gamma.to_string();
      d["gamma_combination"] = integer_vector(dec.gamma_combination);
      d["target"] = coeff_vector(dec.target);
      rec["decomposition"] = std::move(d);
      rec["t_text"] = q.time_exact->to_string();
    } else if (q.op == "realize-clopen") {
      auto cylinders = spectra::clopen_realization(*system, *q.gamma, q.max_depth);
      rec["gamma"] = fraction_string(*q.gamma);
      json arr = json::array();
      for (const auto& c : cylinders) {
        json e;
        e["digits"] = c.digits;
        e["measure"] = fraction_string(c.measure);
        arr.push_back(std::move(e));
      }
      rec["cylinders"] = std::move(arr);
    } else if (q.op == "simulate") {
      SuspensionFlow flow = make_flow();
      auto start = random_start(flow, rng);
      auto coverage = numlab::orbit_coverage(flow, *q.time_numeric, start, q.steps,
                                             {q.grid_x, q.grid_y});
      rec["t"] = *q.time_numeric;
      rec["steps"] = q.steps;
      rec["grid"] = {q.grid_x, q.grid_y};
      rec["fraction"] = coverage.fraction;
      std::vector<std::pair<std::string, std::string>> rows;
      for (const auto& [n, f] : coverage.curve) rows.emplace_back(std::to_string(n), double_string(f));
      std::string file = q.id + ".csv";
      rt.csvs[index].emplace_back(file, emit_csv(rows));
      rec["evidence"] = {file};
    } else if (q.op == "detect") {
      SuspensionFlow flow = make_flow();
      double lambda = q.lambda_exact->numeric();
      auto family = numlab::character_family(flow.base, q.test_order);
      auto start = random_start(flow, rng);
      auto report = numlab::weyl_detector(flow, lambda, start.base, q.steps, family,
                                          cfg.detector_thresholds);
      rec["lambda"] = coeff_vector(*q.lambda_exact);
      rec["lambda_text"] = q.lambda_exact->to_string();
      rec["lambda_numeric"] = lambda;
      rec["steps"] = q.steps;
      rec["final_magnitude"] = report.final_magnitude;
      rec["detector_verdict"] = numlab::verdict_label(report.verdict);
      // concordance with the exact eigenvalue group, when it is known
      auto eig = spectra::suspension_eigen_group(flow);
      if (eig.ok()) {
        bool member = eig.value->group.membership(*q.lambda_exact).has_value();
        rec["exact_member"] = member;
        if (report.verdict != numlab::DetectorVerdict::Inconclusive)
          rec["concordant"] =
              member == (report.verdict == numlab::DetectorVerdict::EigenPositive);
      }
      std::vector<std::pair<std::string, std::string>> rows;
      for (const auto& [n, d] : report.magnitudes)
        rows.emplace_back(std::to_string(n), double_string(d));
      std::string file = q.id + ".csv";
      rt.csvs[index].emplace_back(file, emit_csv(rows));
      rec["evidence"] = {file};
    } else if (q.op == "cycle") {
      SuspensionFlow flow = make_flow();
      std::string measure = q.measure.empty() ? basesys::measure_ids(flow.base).at(0) : q.measure;
      auto start = random_start(flow, rng);
      double lambda = q.lambda_exact->numeric();
      auto est = numlab::asymptotic_cycle_estimate(flow, lambda, start.base, q.steps, measure);
      rec["measure"] = measure;
      rec["lambda_text"] = q.lambda_exact->to_string();
      rec["steps"] = q.steps;
      rec["estimate"] = est.estimate;
      rec["exact_value"] = est.exact_value;
      rec["residual"] = est.residual;
      std::string file = q.id + ".csv";
      rt.csvs[index].emplace_back(
          file, emit_csv({{std::to_string(q.steps), double_string(est.estimate)}}));
      rec["evidence"] = {file};
    } else if (q.op == "conjugacy-check") {
      SuspensionFlow flow{*system,
                          suspension::CeilingFunction{suspension::CeilingFunction::Constant{
                              ExactReal::rational(cfg.basis, 1)}}};
      double residual = numlab::torus_conjugacy_check(flow, *q.time_numeric, q.samples, rng);
      rec["t"] = *q.time_numeric;
      rec["samples"] = q.samples;
      rec["residual"] = residual;
    } else {
      throw std::runtime_error("unhandled op '" + q.op + "'");
    }
  } catch (const std::exception& e) {
    rec["error"] = e.what();
    rt.failed = true;
  }
  auto t1 = std::chrono::steady_clock::now();
  rec["wall_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rt.records[index] = std::move(rec);
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  QueryRuntime rt;
  rt.config = &config;
  rt.records.resize(config.queries.size());
  rt.csvs.resize(config.queries.size());

  const std::size_t n = config.queries.size();
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(
      n, static_cast<std::size_t>(std::max(config.threads, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) execute_query(rt, i);
  } else {
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        execute_query(rt, i);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }

  json report;
  report["schema_version"] = 1;
  report["seed"] = config.seed;
  report["independence_note"] = config.basis->independence_note();
  json names = json::array();
  for (std::size_t i = 0; i < config.basis->generator_count(); ++i)
    names.push_back(config.basis->generator(i).name);
  report["generator_names"] = std::move(names);
  report["records"] = json::array();
  for (auto& rec : rt.records) report["records"].push_back(std::move(rec));
  report["all_known"] = !rt.unknown.load();

  RunOutcome outcome;
  outcome.exit_code = rt.failed ? 1 : 0;
  outcome.any_unknown = rt.unknown;
  outcome.report_json = report.dump(2) + "\n";
  for (auto& per_query : rt.csvs)
    for (auto& file : per_query) outcome.csv_files.push_back(std::move(file));
  return outcome;
}

void write_outcome(const RunOutcome& outcome, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
    out << outcome.report_json;
  }
  for (const auto& [name, content] : outcome.csv_files) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    out << content;
  }
}

}  // namespace minflow::cli
