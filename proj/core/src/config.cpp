#include "minflow/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace minflow::cli {

namespace {

using nlohmann::json;
using qlinear::ExactReal;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& need(const json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing required field '" + key + "'");
  return *it;
}

std::string need_string(const json& obj, const std::string& path, const std::string& key) {
  const json& v = need(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Rational parse_rational_field(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (!v.is_string()) fail(path, "expected an exact rational as \"p/q\" or integer");
  auto q = parse_rational(v.get<std::string>());
  if (!q) fail(path, "malformed rational '" + v.get<std::string>() + "'");
  return *q;
}

ExactReal parse_exact_field(const qlinear::BasisPtr& basis, const json& v,
                            const std::string& path) {
  if (v.is_number_integer()) return ExactReal::rational(basis, Rational(v.get<long long>()));
  if (!v.is_string()) fail(path, "expected an exact literal string");
  auto x = qlinear::parse_exact_real(basis, v.get<std::string>());
  if (!x)
    fail(path, "cannot parse '" + v.get<std::string>() +
                   "' over " + basis->id() + " (unknown generator name or malformed term)");
  return *x;
}

qlinear::BasisPtr parse_basis(const json& root) {
  const json& b = need(root, "config", "basis");
  std::string note = b.value("independence_note", std::string{});
  std::vector<qlinear::GeneratorSpec> specs;
  const json& gens = need(b, "basis", "generators");
  if (!gens.is_array()) fail("basis.generators", "expected an array");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string path = "basis.generators[" + std::to_string(i) + "]";
    const json& g = gens[i];
    qlinear::GeneratorSpec spec;
    spec.name = need_string(g, path, "name");
    const json& enc = need(g, path, "enclosure");
    if (!enc.is_array() || enc.size() != 2) fail(path + ".enclosure", "expected [lo, hi]");
    spec.enclosure = {parse_rational_field(enc[0], path + ".enclosure[0]"),
                      parse_rational_field(enc[1], path + ".enclosure[1]")};
    std::string refiner = need_string(g, path, "refiner");
    if (refiner.rfind("sqrt ", 0) == 0) {
      spec.refiner = qlinear::RefinerKind::SqrtInt;
      try {
        spec.sqrt_arg = Integer(refiner.substr(5));
      } catch (const std::exception&) {
        fail(path + ".refiner", "malformed radicand in '" + refiner + "'");
      }
    } else if (refiner.rfind("decimal-literal ", 0) == 0) {
      spec.refiner = qlinear::RefinerKind::DecimalLiteral;
      spec.decimal_digits = refiner.substr(16);
    } else if (refiner == "opaque") {
      spec.refiner = qlinear::RefinerKind::Opaque;
    } else {
      fail(path + ".refiner",
           "unknown refiner '" + refiner + "' (sqrt n | decimal-literal <digits> | opaque)");
    }
    spec.quadratic_closure = g.value("quadratic_closure", false);
    specs.push_back(std::move(spec));
  }
  try {
    return qlinear::GeneratorBasis::create(std::move(specs), std::move(note));
  } catch (const std::invalid_argument& e) {
    fail("basis", e.what());
  }
}

std::vector<basesys::TrigTerm> parse_trig_terms(const qlinear::BasisPtr&, const json& arr,
                                                const std::string& path) {
  if (!arr.is_array()) fail(path, "expected an array of trig terms");
  std::vector<basesys::TrigTerm> terms;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& t = arr[i];
    basesys::TrigTerm term;
    term.k1 = t.value("k1", t.value("freq", 0));
    term.k2 = t.value("k2", 0);
    if (t.contains("cos")) term.cos_coeff = parse_rational_field(t["cos"], p + ".cos");
    if (t.contains("sin")) term.sin_coeff = parse_rational_field(t["sin"], p + ".sin");
    terms.push_back(std::move(term));
  }
  return terms;
}

basesys::DeclaredSystem parse_declared(const qlinear::BasisPtr& basis, const json& s,
                                       const std::string& path) {
  basesys::DeclaredSystem dec;
  std::vector<ExactReal> eigen, trace;
  for (const json& v : need(s, path, "eigen_lift"))
    eigen.push_back(parse_exact_field(basis, v, path + ".eigen_lift"));
  for (const json& v : need(s, path, "trace_range"))
    trace.push_back(parse_exact_field(basis, v, path + ".trace_range"));
  dec.eigen_lift = qlinear::FgSubgroup::generated_by(basis, std::move(eigen));
  dec.trace_range = qlinear::FgSubgroup::generated_by(basis, std::move(trace));
  dec.traces_agree_on_k0 = s.value("traces_agree_on_k0", false);
  dec.minimal = s.value("minimal", true);
  const json& measures = need(s, path, "measures");
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const std::string mp = path + ".measures[" + std::to_string(i) + "]";
    basesys::DeclaredMeasure m;
    m.id = need_string(measures[i], mp, "id");
    if (measures[i].contains("values")) {
      for (const auto& [fn, value] : measures[i]["values"].items())
        m.values.emplace_back(fn, parse_exact_field(basis, value, mp + ".values." + fn));
    }
    dec.measures.push_back(std::move(m));
  }
  // declared invariant: eigenvalue lift sits inside the trace range
  for (const auto& g : dec.eigen_lift.generators())
    if (!dec.trace_range.membership(g))
      fail(path, "declared eigen_lift generator " + g.to_string() +
                     " is not a member of the declared trace_range");
  return dec;
}

basesys::BaseSystem parse_system(const qlinear::BasisPtr& basis, const json& s,
                                 const std::string& path) {
  basesys::BaseSystem sys;
  sys.basis = basis;
  sys.name = need_string(s, path, "name");
  std::string kind = need_string(s, path, "kind");
  if (kind == "point") {
    sys.kind = basesys::PointSystem{};
  } else if (kind == "circle-rotation") {
    auto angle = parse_exact_field(basis, need(s, path, "angle"), path + ".angle");
    if (angle.is_rational())
      fail(path + ".angle",
           "rotation angle must involve a declared irrational generator (rational "
           "rotations are not minimal)");
    sys.kind = basesys::CircleRotation{std::move(angle)};
  } else if (kind == "torus-translation") {
    sys.kind = basesys::TorusTranslation{
        parse_exact_field(basis, need(s, path, "s1"), path + ".s1"),
        parse_exact_field(basis, need(s, path, "s2"), path + ".s2")};
  } else if (kind == "odometer") {
    basesys::Odometer odo;
    for (const json& d : need(s, path, "digits")) {
      if (!d.is_number_integer() || d.get<int>() < 2)
        fail(path + ".digits", "every digit bound must be an integer >= 2");
      odo.digits.push_back(d.get<int>());
    }
    if (odo.digits.empty()) fail(path + ".digits", "needs at least one digit bound");
    odo.group_depth = s.value("group_depth", 0);
    sys.kind = std::move(odo);
  } else if (kind == "denjoy") {
    basesys::Denjoy den{parse_exact_field(basis, need(s, path, "rotation"), path + ".rotation"),
                        {}};
    if (den.rotation.is_rational())
      fail(path + ".rotation", "Denjoy rotation numbers are irrational by definition");
    for (const json& m : need(s, path, "markers"))
      den.markers.push_back(parse_exact_field(basis, m, path + ".markers"));
    sys.kind = std::move(den);
  } else if (kind == "furstenberg") {
    basesys::Furstenberg fur{
        parse_exact_field(basis, need(s, path, "theta"), path + ".theta"),
        s.value("twist", 1),
        s.contains("xi") ? parse_trig_terms(basis, s["xi"], path + ".xi")
                         : std::vector<basesys::TrigTerm>{},
        std::nullopt};
    if (fur.twist == 0) fail(path + ".twist", "twist exponent must be nonzero");
    if (s.contains("declared"))
      fur.declared_spectra = parse_declared(basis, s["declared"], path + ".declared");
    sys.kind = std::move(fur);
  } else if (kind == "declared") {
    sys.kind = parse_declared(basis, s, path);
  } else {
    fail(path + ".kind", "unknown system kind '" + kind + "'");
  }
  return sys;
}

suspension::CeilingFunction parse_ceiling(const qlinear::BasisPtr& basis, const json& c,
                                          const std::string& path) {
  using CF = suspension::CeilingFunction;
  std::string kind = need_string(c, path, "kind");
  if (kind == "constant")
    return CF{CF::Constant{parse_exact_field(basis, need(c, path, "value"), path + ".value")}};
  if (kind == "trig-poly") {
    CF::TrigPoly tp;
    tp.constant = parse_rational_field(need(c, path, "constant"), path + ".constant");
    if (c.contains("terms")) tp.terms = parse_trig_terms(basis, c["terms"], path + ".terms");
    return CF{std::move(tp)};
  }
  if (kind == "cylinder") {
    CF::CylinderValues cv;
    cv.depth = need(c, path, "depth").get<int>();
    for (const json& v : need(c, path, "values"))
      cv.values.push_back(parse_rational_field(v, path + ".values"));
    return CF{std::move(cv)};
  }
  if (kind == "cohomologous") {
    CF::CohomologousToConstant co{
        parse_exact_field(basis, need(c, path, "constant"), path + ".constant"),
        parse_trig_terms(basis, need(c, path, "transfer"), path + ".transfer")};
    return CF{std::move(co)};
  }
  if (kind == "declared-fn")
    return CF{CF::DeclaredFn{need_string(c, path, "fn")}};
  fail(path + ".kind", "unknown ceiling kind '" + kind + "'");
}

Query parse_query(const RunConfig& cfg, const json& q, const std::string& path) {
  Query query;
  query.id = need_string(q, path, "id");
  query.op = need_string(q, path, "op");

  auto resolve_system = [&]() {
    query.system = need_string(q, path, "system");
    if (!cfg.find_system(query.system))
      fail(path + ".system", "unknown system '" + query.system + "'");
  };
  auto require_odometer = [&]() {
    if (!std::get_if<basesys::Odometer>(&cfg.find_system(query.system)->kind))
      fail(path + ".system", "'" + query.system + "' is not an odometer");
  };
  auto require_rotation = [&]() {
    if (!std::get_if<basesys::CircleRotation>(&cfg.find_system(query.system)->kind))
      fail(path + ".system",
           "'" + query.system + "' is not a circle rotation (the chart needs one)");
  };
  auto forbid_declared = [&]() {
    if (std::get_if<basesys::DeclaredSystem>(&cfg.find_system(query.system)->kind))
      fail(path + ".system",
           "'" + query.system + "' is declared-only (no concrete orbits to sample)");
  };
  auto resolve_ceiling = [&]() {
    query.ceiling = need_string(q, path, "ceiling");
    if (!cfg.find_ceiling(query.ceiling))
      fail(path + ".ceiling", "unknown ceiling '" + query.ceiling + "'");
  };
  auto exact_or_fail = [&](const char* key) {
    return parse_exact_field(cfg.basis, need(q, path, key), path + "." + key);
  };
  auto numeric_time = [&](const char* key) -> double {
    const json& v = need(q, path, key);
    if (v.is_number()) return v.get<double>();
    return parse_exact_field(cfg.basis, v, path + "." + key).numeric();
  };

  if (query.op == "decide") {
    resolve_system();
    resolve_ceiling();
    if (q.contains("rho"))
      query.rho = exact_or_fail("rho");
    else if (q.contains("t"))
      query.time_exact = exact_or_fail("t");
    else
      fail(path, "decide needs 'rho' (reciprocal time) or 't'");
  } else if (query.op == "eigens") {
    resolve_system();
    resolve_ceiling();
  } else if (query.op == "lambdak") {
    resolve_system();
    resolve_ceiling();
    query.measure = need_string(q, path, "measure");
  } else if (query.op == "decompose") {
    resolve_system();
    query.time_exact = exact_or_fail("t");
  } else if (query.op == "realize-clopen") {
    resolve_system();
    require_odometer();
    query.gamma = parse_rational_field(need(q, path, "gamma"), path + ".gamma");
    query.max_depth = q.value("max_depth", 16);
  } else if (query.op == "simulate") {
    resolve_system();
    resolve_ceiling();
    forbid_declared();
    query.time_numeric = numeric_time("t");
    query.steps = q.value("steps", 200000LL);
    if (q.contains("grid")) {
      const json& g = q["grid"];
      if (!g.is_array() || g.size() != 2) fail(path + ".grid", "expected [gx, gy]");
      query.grid_x = g[0].get<int>();
      query.grid_y = g[1].get<int>();
    }
  } else if (query.op == "detect") {
    resolve_system();
    resolve_ceiling();
    forbid_declared();
    query.lambda_exact = exact_or_fail("lambda");
    query.steps = q.value("steps", 100000LL);
    query.test_order = q.value("test_order", 8);
  } else if (query.op == "cycle") {
    resolve_system();
    resolve_ceiling();
    forbid_declared();
    query.lambda_exact = exact_or_fail("lambda");
    query.steps = q.value("steps", 1000000LL);
    if (q.contains("measure")) query.measure = q["measure"].get<std::string>();
  } else if (query.op == "conjugacy-check") {
    resolve_system();
    require_rotation();
    query.time_numeric = numeric_time("t");
    query.samples = q.value("samples", 10000);
  } else {
    fail(path + ".op", "unknown op '" + query.op + "'");
  }
  return query;
}

}  // namespace

const basesys::BaseSystem* RunConfig::find_system(const std::string& name) const {
  for (const auto& s : systems)
    if (s.name == name) return &s;
  return nullptr;
}

const suspension::CeilingFunction* RunConfig::find_ceiling(const std::string& name) const {
  for (const auto& [n, c] : ceilings)
    if (n == name) return &c;
  return nullptr;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig cfg;
  cfg.seed = root.value("seed", 0ULL);
  cfg.threads = root.value("threads", 1);
  if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
  if (root.contains("detector_thresholds")) {
    const json& th = root["detector_thresholds"];
    cfg.detector_thresholds.positive = th.value("positive", 0.5);
    cfg.detector_thresholds.negative = th.value("negative", 0.1);
  }

  cfg.basis = parse_basis(root);

  if (root.contains("systems")) {
    const json& systems = root["systems"];
    if (!systems.is_array()) throw ConfigError("systems: expected an array");
    for (std::size_t i = 0; i < systems.size(); ++i) {
      auto sys = parse_system(cfg.basis, systems[i], "systems[" + std::to_string(i) + "]");
      if (cfg.find_system(sys.name))
        fail("systems[" + std::to_string(i) + "]", "duplicate system name '" + sys.name + "'");
      cfg.systems.push_back(std::move(sys));
    }
  }
  if (root.contains("ceilings")) {
    const json& ceilings = root["ceilings"];
    if (!ceilings.is_array()) throw ConfigError("ceilings: expected an array");
    for (std::size_t i = 0; i < ceilings.size(); ++i) {
      const std::string path = "ceilings[" + std::to_string(i) + "]";
      std::string name = need_string(ceilings[i], path, "name");
      if (cfg.find_ceiling(name)) fail(path, "duplicate ceiling name '" + name + "'");
      cfg.ceilings.emplace_back(name, parse_ceiling(cfg.basis, ceilings[i], path));
    }
  }
  if (root.contains("queries")) {
    const json& queries = root["queries"];
    if (!queries.is_array()) throw ConfigError("queries: expected an array");
    for (std::size_t i = 0; i < queries.size(); ++i) {
      auto query = parse_query(cfg, queries[i], "queries[" + std::to_string(i) + "]");
      for (const auto& seen : cfg.queries)
        if (seen.id == query.id)
          fail("queries[" + std::to_string(i) + "]", "duplicate query id '" + query.id + "'");
      cfg.queries.push_back(std::move(query));
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string catalog_text() {
  return R"(systems:
  point                                     one-point system
  circle-rotation   angle                   irrational rotation of the circle
  torus-translation s1 s2                   translation of the 2-torus
  odometer          digits[] group_depth    adding machine with periodic digit bounds
  denjoy            rotation markers[]      Denjoy system over its rotation factor
  furstenberg       theta twist xi[]        skew product (inverse map); spectra by declaration
  declared          eigen_lift trace_range  spectral data supplied directly

ceilings:
  constant          value                   exact constant
  trig-poly         constant terms[]        rational trig polynomial (circle/torus)
  cylinder          depth values[]          locally constant on odometer cylinders
  cohomologous      constant transfer[]     c + g(Sx) - g(x)
  declared-fn       fn                      integrals declared per measure

queries:
  decide            system ceiling rho|t    minimality of the time-1/rho map, certified
  eigens            system ceiling          eigenvalue group of the suspension
  lambdak           system ceiling measure  trace image of the eigenvalue group
  decompose         system t                t = r1 + r2*gamma over the standard suspension
  realize-clopen    system gamma            cylinders realizing a rational measure
  simulate          system ceiling t steps grid      orbit-coverage probe
  detect            system ceiling lambda steps      Weyl-sum eigenvalue detector
  cycle             system ceiling lambda steps      Birkhoff asymptotic-cycle estimate
  conjugacy-check   system t samples        torus-chart intertwining residual
)";
}

}  // namespace minflow::cli
