#include "minflow/report.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace minflow::cli {

namespace {

using nlohmann::json;

std::optional<std::vector<Rational>> parse_vector(const json& arr) {
  if (!arr.is_array()) return std::nullopt;
  std::vector<Rational> out;
  for (const auto& v : arr) {
    if (!v.is_string()) return std::nullopt;
    auto q = parse_rational(v.get<std::string>());
    if (!q) return std::nullopt;
    out.push_back(*q);
  }
  return out;
}

}  // namespace

std::string emit_csv(const std::vector<std::pair<std::string, std::string>>& series) {
  std::ostringstream out;
  out << "checkpoint,value\n";
  for (const auto& [checkpoint, value] : series) out << checkpoint << "," << value << "\n";
  return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_csv(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return rows;
}

VerifyResult verify_report_text(const std::string& report_json) {
  VerifyResult result;
  json root;
  try {
    root = json::parse(report_json);
  } catch (const json::parse_error& e) {
    result.ok = false;
    result.failures.push_back(std::string("report is not valid JSON: ") + e.what());
    return result;
  }

  auto fail = [&](const std::string& id, const std::string& what) {
    result.ok = false;
    result.failures.push_back(id + ": " + what);
  };

  for (const auto& rec : root.value("records", json::array())) {
    ++result.records_seen;
    const std::string id = rec.value("id", "?");

    if (rec.contains("certificate")) {
      const json& cert = rec["certificate"];
      auto r = parse_rational(cert.value("r", ""));
      auto lambda = parse_vector(cert.value("lambda", json::array()));
      auto rho = parse_vector(rec.value("rho", json::array()));
      auto combination = parse_vector(cert.value("lambda_combination", json::array()));
      if (!r || !lambda || !rho || !combination) {
        fail(id, "certificate fields are malformed");
        continue;
      }
      std::vector<std::vector<Rational>> generators;
      bool gens_ok = true;
      for (const auto& g : cert.value("group_generators", json::array())) {
        auto vec = parse_vector(g);
        if (!vec || vec->size() != lambda->size()) {
          gens_ok = false;
          break;
        }
        generators.push_back(std::move(*vec));
      }
      if (!gens_ok || generators.size() != combination->size() || rho->size() != lambda->size()) {
        fail(id, "certificate dimensions are inconsistent");
        continue;
      }
      ++result.certificates_checked;
      // lambda = sum n_i * generator_i, coefficientwise
      std::vector<Rational> recombined(lambda->size(), Rational(0));
      for (std::size_t i = 0; i < generators.size(); ++i) {
        if (!is_integer((*combination)[i])) {
          fail(id, "combination coefficient " + fraction_string((*combination)[i]) +
                       " is not an integer");
          break;
        }
        for (std::size_t d = 0; d < recombined.size(); ++d)
          recombined[d] += (*combination)[i] * generators[i][d];
      }
      if (recombined != *lambda) {
        fail(id, "lambda does not recombine from its group certificate");
        continue;
      }
      if (*r == 0) {
        fail(id, "certificate scalar r must be nonzero");
        continue;
      }
      for (std::size_t d = 0; d < rho->size(); ++d) {
        if ((*rho)[d] != *r * (*lambda)[d]) {
          fail(id, "rho != r * lambda at coordinate " + std::to_string(d));
          break;
        }
      }
    }

    if (rec.contains("decomposition")) {
      const json& dec = rec["decomposition"];
      auto r1 = parse_rational(dec.value("r1", ""));
      auto r2 = parse_rational(dec.value("r2", ""));
      auto gamma = parse_vector(dec.value("gamma", json::array()));
      auto target = parse_vector(dec.value("target", json::array()));
      if (!r1 || !r2 || !gamma || !target || gamma->size() != target->size()) {
        fail(id, "decomposition fields are malformed");
        continue;
      }
      ++result.certificates_checked;
      for (std::size_t d = 0; d < target->size(); ++d) {
        Rational expect = *r2 * (*gamma)[d];
        if (d == 0) expect += *r1;
        if ((*target)[d] != expect) {
          fail(id, "decomposition does not recombine at coordinate " + std::to_string(d));
          break;
        }
      }
    }

    if (rec.contains("cylinders")) {
      auto gamma = parse_rational(rec.value("gamma", ""));
      if (!gamma) {
        fail(id, "clopen record lacks an exact gamma");
        continue;
      }
      ++result.certificates_checked;
      Rational total{0};
      bool rows_ok = true;
      for (const auto& c : rec["cylinders"]) {
        auto m = parse_rational(c.value("measure", ""));
        if (!m) {
          fail(id, "cylinder measure is malformed");
          rows_ok = false;
          break;
        }
        total += *m;
      }
      if (rows_ok && total != *gamma) fail(id, "cylinder measures do not sum to gamma");
    }
  }
  return result;
}

VerifyResult verify_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    VerifyResult r;
    r.ok = false;
    r.failures.push_back("cannot open report file '" + path + "'");
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return verify_report_text(buf.str());
}

}  // namespace minflow::cli
