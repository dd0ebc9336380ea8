#include "doctest.h"

#include "minflow/config.hpp"
#include "minflow/report.hpp"
#include "minflow/runner.hpp"

#include <regex>

using namespace minflow;
using namespace minflow::cli;

namespace {

const char* kBaseConfig = R"({
  "seed": 7,
  "basis": {
    "independence_note": "1, sqrt2, sqrt3 assumed independent over Q",
    "generators": [
      {"name": "sqrt2", "enclosure": ["1.4", "1.5"], "refiner": "sqrt 2", "quadratic_closure": true},
      {"name": "sqrt3", "enclosure": ["1.7", "1.8"], "refiner": "sqrt 3"}
    ]
  },
  "systems": [
    {"name": "rot", "kind": "circle-rotation", "angle": "sqrt2"},
    {"name": "odo", "kind": "odometer", "digits": [2, 2, 3]},
    {"name": "pt", "kind": "point"},
    {"name": "dec", "kind": "declared",
     "eigen_lift": ["1"], "trace_range": ["1"], "traces_agree_on_k0": true,
     "measures": [
       {"id": "mu0", "values": {"fsep": "2"}},
       {"id": "mu1", "values": {"fsep": "3"}}
     ]}
  ],
  "ceilings": [
    {"name": "one", "kind": "constant", "value": "1"},
    {"name": "fsep", "kind": "declared-fn", "fn": "fsep"}
  ],
  "queries": []
})";

std::string with_queries(const std::string& queries_json) {
  std::string text = kBaseConfig;
  auto pos = text.rfind("\"queries\": []");
  REQUIRE(pos != std::string::npos);
  return text.substr(0, pos) + "\"queries\": " + queries_json + "\n}";
}

std::string strip_wall_clock(std::string text) {
  static const std::regex wall(R"("wall_ms": [0-9.e+-]+,?)");
  return std::regex_replace(text, wall, "");
}

}  // namespace

TEST_CASE("config validation diagnostics") {
  CHECK_THROWS_AS(parse_config("not json at all"), ConfigError);

  // undeclared generator is named in the diagnostic
  try {
    parse_config(with_queries(
        R"([{"id":"q1","op":"decide","system":"rot","ceiling":"one","rho":"2*sqrt5"}])"));
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("sqrt5") != std::string::npos);
    CHECK(msg.find("queries[0].rho") != std::string::npos);
  }

  // unknown system name
  try {
    parse_config(with_queries(
        R"([{"id":"q1","op":"decide","system":"nope","ceiling":"one","rho":"1"}])"));
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }

  // missing parameters for the op
  CHECK_THROWS_AS(
      parse_config(with_queries(R"([{"id":"q1","op":"decide","system":"rot","ceiling":"one"}])")),
      ConfigError);

  // declared eigen lift must sit inside the declared trace range
  std::string bad = kBaseConfig;
  bad.replace(bad.find("\"eigen_lift\": [\"1\"]"), 18, "\"eigen_lift\": [\"sqrt2\"]");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  // query parameters type-check against the target system at parse time
  CHECK_THROWS_AS(parse_config(with_queries(
                      R"([{"id":"q","op":"realize-clopen","system":"rot","gamma":"1/2"}])")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(with_queries(
                      R"([{"id":"q","op":"conjugacy-check","system":"odo","t":1.0}])")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(with_queries(
                      R"([{"id":"q","op":"simulate","system":"dec","ceiling":"fsep","t":0.5}])")),
                  ConfigError);

  // rational rotation angles are rejected up front
  std::string ratrot = kBaseConfig;
  ratrot.replace(ratrot.find("\"angle\": \"sqrt2\""), 16, "\"angle\": \"1/2\"");
  CHECK_THROWS_AS(parse_config(ratrot), ConfigError);
}

TEST_CASE("end-to-end decide run with verified certificates") {
  auto cfg = parse_config(with_queries(R"([
    {"id": "q1", "op": "decide", "system": "rot", "ceiling": "one", "rho": "3/2 + 2*sqrt2"},
    {"id": "q2", "op": "decide", "system": "rot", "ceiling": "one", "rho": "sqrt3"},
    {"id": "q3", "op": "decide", "system": "pt", "ceiling": "one", "t": "2/3"},
    {"id": "q4", "op": "decide", "system": "dec", "ceiling": "fsep", "rho": "5"},
    {"id": "q5", "op": "decompose", "system": "rot", "t": "3 + 2*sqrt2"},
    {"id": "q6", "op": "realize-clopen", "system": "odo", "gamma": "5/12"}
  ])"));
  auto outcome = run(cfg);
  CHECK(outcome.exit_code == 0);
  CHECK_FALSE(outcome.any_unknown);

  CHECK(outcome.report_json.find("\"not-minimal\"") != std::string::npos);
  CHECK(outcome.report_json.find("\"minimal\"") != std::string::npos);

  auto verified = verify_report_text(outcome.report_json);
  CHECK(verified.ok);
  CHECK(verified.records_seen == 6);
  CHECK(verified.certificates_checked >= 4);  // q1, q3, q5, q6

  // a corrupted certificate fails verification
  std::string tampered = outcome.report_json;
  auto pos = tampered.find("\"r\": \"1/2\"");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 10, "\"r\": \"1/3\"");
  auto broken = verify_report_text(tampered);
  CHECK_FALSE(broken.ok);
}

TEST_CASE("runs are deterministic and ordered") {
  auto make = [] {
    return parse_config(with_queries(R"([
      {"id": "a", "op": "decide", "system": "rot", "ceiling": "one", "rho": "1 - sqrt2"},
      {"id": "b", "op": "simulate", "system": "rot", "ceiling": "one", "t": 0.317, "steps": 2000, "grid": [16, 16]},
      {"id": "c", "op": "detect", "system": "rot", "ceiling": "one", "lambda": "1 + sqrt2", "steps": 4000, "test_order": 4},
      {"id": "d", "op": "cycle", "system": "rot", "ceiling": "one", "lambda": "2", "steps": 5000},
      {"id": "e", "op": "conjugacy-check", "system": "rot", "t": 1.25, "samples": 2000}
    ])"));
  };
  auto first = run(make());
  auto second = run(make());
  CHECK(first.exit_code == 0);
  CHECK(strip_wall_clock(first.report_json) == strip_wall_clock(second.report_json));
  CHECK(first.csv_files == second.csv_files);

  // thread fan-out changes nothing but speed
  auto cfg3 = make();
  cfg3.threads = 3;
  auto third = run(cfg3);
  CHECK(strip_wall_clock(first.report_json) == strip_wall_clock(third.report_json));

  // record order follows query order
  auto ra = first.report_json.find("\"id\": \"a\"");
  auto rc = first.report_json.find("\"id\": \"c\"");
  auto re = first.report_json.find("\"id\": \"e\"");
  CHECK(ra < rc);
  CHECK(rc < re);
}

TEST_CASE("batch of one hundred decides keeps query order") {
  std::string queries = "[";
  for (int i = 0; i < 100; ++i) {
    if (i) queries += ",";
    int a = (i % 19) - 9;
    int b = (i % 7) + 1;
    queries += "{\"id\":\"q" + std::to_string(i) + "\",\"op\":\"decide\",\"system\":\"rot\"," +
               "\"ceiling\":\"one\",\"rho\":\"" + std::to_string(a) + "/" + std::to_string(b) +
               " + " + std::to_string(b) + "*sqrt2\"}";
  }
  queries += "]";
  auto outcome = run(parse_config(with_queries(queries)));
  CHECK(outcome.exit_code == 0);
  std::size_t last = 0;
  for (int i = 0; i < 100; ++i) {
    auto pos = outcome.report_json.find("\"id\": \"q" + std::to_string(i) + "\"");
    REQUIRE(pos != std::string::npos);
    CHECK(pos >= last);
    last = pos;
  }
  auto verified = verify_report_text(outcome.report_json);
  CHECK(verified.ok);
  CHECK(verified.certificates_checked == 100);
}

TEST_CASE("runtime failures exit nonzero and name the query") {
  auto cfg = parse_config(with_queries(
      R"([{"id": "bad", "op": "realize-clopen", "system": "odo", "gamma": "1/5"},
          {"id": "ok", "op": "decide", "system": "rot", "ceiling": "one", "rho": "2"}])"));
  auto outcome = run(cfg);
  CHECK(outcome.exit_code == 1);
  CHECK(outcome.report_json.find("\"error\"") != std::string::npos);
  // the healthy query still ran
  CHECK(outcome.report_json.find("\"id\": \"ok\"") != std::string::npos);
  CHECK(outcome.report_json.find("\"not-minimal\"") != std::string::npos);
}

TEST_CASE("unknown verdicts exit zero with a report flag") {
  std::string text = kBaseConfig;
  auto pos = text.find("\"systems\": [");
  REQUIRE(pos != std::string::npos);
  text.insert(pos + 12,
              "\n    {\"name\": \"fur\", \"kind\": \"furstenberg\", \"theta\": \"sqrt2\", "
              "\"twist\": 1},");
  pos = text.rfind("\"queries\": []");
  text = text.substr(0, pos) +
         R"("queries": [{"id":"u1","op":"decide","system":"fur","ceiling":"one","rho":"sqrt2"}]
})";
  auto outcome = run(parse_config(text));
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.any_unknown);
  CHECK(outcome.report_json.find("\"all_known\": false") != std::string::npos);
  CHECK(outcome.report_json.find("\"unknown\"") != std::string::npos);
  CHECK(outcome.report_json.find("evidence_hint") != std::string::npos);
}

TEST_CASE("csv emission and round trip") {
  CHECK(emit_csv({}) == "checkpoint,value\n");

  std::vector<std::pair<std::string, std::string>> series;
  for (int i = 1; i <= 5; ++i)
    series.emplace_back(std::to_string(i * 100), fraction_string(Rational(i, 7)));
  std::string text = emit_csv(series);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  CHECK(text.back() == '\n');

  auto parsed = parse_csv(text);
  REQUIRE(parsed.size() == series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(parsed[i].first == series[i].first);
    CHECK(parsed[i].second == series[i].second);
    auto q = parse_rational(parsed[i].second);
    REQUIRE(q.has_value());
    CHECK(*q == Rational(static_cast<int>(i) + 1, 7));
  }
}

TEST_CASE("detector queries record exact concordance") {
  auto cfg = parse_config(with_queries(R"([
    {"id": "hit", "op": "detect", "system": "odo", "ceiling": "one", "lambda": "5/12", "steps": 6000, "test_order": 0},
    {"id": "miss", "op": "detect", "system": "odo", "ceiling": "one", "lambda": "1/5", "steps": 60000, "test_order": 0}
  ])"));
  auto outcome = run(cfg);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report_json.find("\"eigen-positive\"") != std::string::npos);
  CHECK(outcome.report_json.find("\"eigen-negative\"") != std::string::npos);
  // both verdicts agree with the exact group
  CHECK(outcome.report_json.find("\"concordant\": false") == std::string::npos);
}
