#include "cylflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cylflow/rng.hpp"

namespace cylflow {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw config_error("config: " + msg); }

void expect_object(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where + " must be an object");
}

// Strict-mode guard: every key must be on the allow list for its block.
void check_keys(const Json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown key \"" + item.key() + "\" in " + where);
  }
}

void require_key(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where + " requires key \"" + std::string(key) + "\"");
}

Real as_real(const Json& v, const std::string& what) {
  if (!v.is_number()) fail(what + " must be a number");
  return v.get<Real>();
}

Real get_real(const Json& j, const char* key, const std::string& where, Real fallback) {
  if (!j.contains(key)) return fallback;
  return as_real(j.at(key), where + "." + key);
}

Real require_real(const Json& j, const char* key, const std::string& where) {
  require_key(j, key, where);
  return as_real(j.at(key), where + "." + key);
}

int get_int(const Json& j, const char* key, const std::string& where, int fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const Json& j, const char* key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_boolean()) fail(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const Json& j, const char* key, const std::string& where,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
  require_key(j, key, where);
  const Json& v = j.at(key);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

// A series is either a bare number (constant) or {constant, cos, sin} with
// cos/sin arrays of [harmonic, coefficient] pairs.
TrigSeries parse_series(const Json& j, const std::string& where) {
  TrigSeries s;
  if (j.is_number()) {
    s.constant = j.get<Real>();
    return s;
  }
  expect_object(j, where);
  check_keys(j, where, {"constant", "cos", "sin"});
  s.constant = get_real(j, "constant", where, 0.0);
  auto parse_terms = [&](const char* key, std::vector<std::pair<int, Real>>& out) {
    if (!j.contains(key)) return;
    const Json& arr = j.at(key);
    if (!arr.is_array())
      fail(where + "." + key + " must be an array of [harmonic, coefficient] pairs");
    for (const Json& term : arr) {
      if (!term.is_array() || term.size() != 2 || !term[0].is_number_integer() ||
          !term[1].is_number())
        fail(where + "." + key + " entries must be [harmonic, coefficient] pairs");
      const int k = term[0].get<int>();
      if (k < 1) fail(where + "." + key + " harmonics must be >= 1");
      out.emplace_back(k, term[1].get<Real>());
    }
  };
  parse_terms("cos", s.cosine);
  parse_terms("sin", s.sine);
  return s;
}

DomainSpec parse_domain(const Json& j) {
  expect_object(j, "domain");
  const std::string kind = require_string(j, "kind", "domain");
  if (kind == "interval") {
    check_keys(j, "domain", {"kind", "a", "b", "nodes"});
    IntervalSpec s;
    s.a = get_real(j, "a", "domain", -1.0);
    s.b = get_real(j, "b", "domain", 1.0);
    s.nodes = get_int(j, "nodes", "domain", 101);
    if (!(s.b > s.a)) fail("domain.b must exceed domain.a");
    if (s.nodes < 5) fail("domain.nodes must be at least 5");
    return s;
  }
  if (kind == "star") {
    check_keys(j, "domain", {"kind", "radius", "n_xi", "n_eta", "rho_floor"});
    require_key(j, "radius", "domain");
    StarSpec s;
    s.radius = parse_series(j.at("radius"), "domain.radius");
    s.n_xi = get_int(j, "n_xi", "domain", 17);
    s.n_eta = get_int(j, "n_eta", "domain", 16);
    s.rho_floor = get_real(j, "rho_floor", "domain", 0.0);
    return s;  // mesh/positivity checks live in build_geometry
  }
  fail("domain.kind must be \"interval\" or \"star\", got \"" + kind + "\"");
}

ThetaSpec parse_theta(const Json& j) {
  expect_object(j, "theta");
  const std::string kind = require_string(j, "kind", "theta");
  if (kind == "constant") {
    check_keys(j, "theta", {"kind", "value"});
    return ConstantTheta{require_real(j, "value", "theta")};
  }
  if (kind == "series") {
    check_keys(j, "theta", {"kind", "constant", "cos", "sin"});
    Json body = j;
    body.erase("kind");
    return BoundaryThetaSeries{parse_series(body, "theta")};
  }
  if (kind == "endpoints") {
    check_keys(j, "theta", {"kind", "left", "right"});
    return EndpointTheta{require_real(j, "left", "theta"),
                         require_real(j, "right", "theta")};
  }
  fail("theta.kind must be \"constant\", \"series\" or \"endpoints\", got \"" + kind +
       "\"");
}

InitialSpec parse_initial(const Json& j) {
  expect_object(j, "initial");
  const std::string family = require_string(j, "family", "initial");
  InitialSpec s;
  if (family == "zero") {
    check_keys(j, "initial", {"family"});
    s.family = InitialSpec::Family::Zero;
  } else if (family == "constant") {
    check_keys(j, "initial", {"family", "value"});
    s.family = InitialSpec::Family::Constant;
    s.value = require_real(j, "value", "initial");
  } else if (family == "quadratic") {
    check_keys(j, "initial", {"family", "coefficient"});
    s.family = InitialSpec::Family::Quadratic;
    s.coefficient = require_real(j, "coefficient", "initial");
  } else if (family == "bump") {
    check_keys(j, "initial", {"family", "amplitude", "width"});
    s.family = InitialSpec::Family::Bump;
    s.amplitude = require_real(j, "amplitude", "initial");
    s.width = get_real(j, "width", "initial", 0.25);
    if (!(s.width > 0)) fail("initial.width must be positive");
  } else if (family == "random") {
    check_keys(j, "initial", {"family", "amplitude", "max_mode", "terms"});
    s.family = InitialSpec::Family::Random;
    s.amplitude = require_real(j, "amplitude", "initial");
    s.max_mode = get_int(j, "max_mode", "initial", 2);
    s.terms = get_int(j, "terms", "initial", 4);
    if (s.max_mode < 1) fail("initial.max_mode must be at least 1");
    if (s.terms < 1) fail("initial.terms must be at least 1");
  } else {
    fail("initial.family must be one of \"zero\", \"constant\", \"quadratic\", "
         "\"bump\", \"random\"; got \"" +
         family + "\"");
  }
  return s;
}

void parse_scheme(const Json& j, ScenarioConfig& cfg) {
  expect_object(j, "scheme");
  check_keys(j, "scheme", {"kind", "cfl", "dt"});
  const std::string kind = get_string(j, "kind", "scheme", "explicit");
  if (kind == "explicit")
    cfg.scheme = Scheme::Explicit;
  else if (kind == "semi_implicit")
    cfg.scheme = Scheme::SemiImplicit;
  else
    fail("scheme.kind must be \"explicit\" or \"semi_implicit\", got \"" + kind + "\"");
  cfg.cfl = get_real(j, "cfl", "scheme", cfg.cfl);
  if (!(cfg.cfl > 0) || cfg.cfl > 10) fail("scheme.cfl must lie in (0, 10]");
  cfg.dt_override = get_real(j, "dt", "scheme", 0.0);
  if (cfg.dt_override < 0) fail("scheme.dt must be nonnegative (0 = automatic)");
}

void parse_run(const Json& j, RunSpec& run) {
  expect_object(j, "run");
  check_keys(j, "run",
             {"mode", "horizon", "record_every", "store_snapshots", "snapshot_every",
              "stop_rules", "comparison_pairs"});
  run.mode = get_string(j, "mode", "run", run.mode);
  if (run.mode != "flow" && run.mode != "comparison")
    fail("run.mode must be \"flow\" or \"comparison\", got \"" + run.mode + "\"");
  run.horizon = get_real(j, "horizon", "run", run.horizon);
  if (!(run.horizon > 0)) fail("run.horizon must be positive");
  run.record_every = get_int(j, "record_every", "run", run.record_every);
  if (run.record_every < 1) fail("run.record_every must be at least 1");
  run.store_snapshots = get_bool(j, "store_snapshots", "run", run.store_snapshots);
  run.snapshot_every = get_int(j, "snapshot_every", "run", run.snapshot_every);
  if (run.snapshot_every < 1) fail("run.snapshot_every must be at least 1");
  run.stop_rules = get_bool(j, "stop_rules", "run", run.stop_rules);
  run.comparison_pairs = get_int(j, "comparison_pairs", "run", run.comparison_pairs);
  if (run.comparison_pairs < 1) fail("run.comparison_pairs must be at least 1");
}

void parse_tolerances(const Json& j, ToleranceSpec& tol) {
  expect_object(j, "tolerances");
  check_keys(j, "tolerances",
             {"eps_stationary", "eps_translator", "tol_c_scale", "tol_I_scale",
              "newton_tol", "newton_max_iters", "bc_tol", "linear_tol",
              "linear_max_iter", "tau_boundary", "tau_speed", "uniqueness_probes",
              "flux_gate_coeff"});
  tol.eps_stationary = get_real(j, "eps_stationary", "tolerances", tol.eps_stationary);
  tol.eps_translator = get_real(j, "eps_translator", "tolerances", tol.eps_translator);
  tol.tol_c_scale = get_real(j, "tol_c_scale", "tolerances", tol.tol_c_scale);
  tol.tol_I_scale = get_real(j, "tol_I_scale", "tolerances", tol.tol_I_scale);
  tol.newton_tol = get_real(j, "newton_tol", "tolerances", tol.newton_tol);
  tol.newton_max_iters = get_int(j, "newton_max_iters", "tolerances", tol.newton_max_iters);
  tol.bc_tol = get_real(j, "bc_tol", "tolerances", tol.bc_tol);
  tol.linear_tol = get_real(j, "linear_tol", "tolerances", tol.linear_tol);
  tol.linear_max_iter = get_int(j, "linear_max_iter", "tolerances", tol.linear_max_iter);
  tol.tau_boundary = get_real(j, "tau_boundary", "tolerances", tol.tau_boundary);
  tol.tau_speed = get_real(j, "tau_speed", "tolerances", tol.tau_speed);
  tol.uniqueness_probes = get_int(j, "uniqueness_probes", "tolerances", tol.uniqueness_probes);
  tol.flux_gate_coeff = get_real(j, "flux_gate_coeff", "tolerances", tol.flux_gate_coeff);
  for (const auto& [name, value] :
       {std::pair<const char*, Real>{"eps_stationary", tol.eps_stationary},
        {"eps_translator", tol.eps_translator},
        {"tol_c_scale", tol.tol_c_scale},
        {"tol_I_scale", tol.tol_I_scale},
        {"newton_tol", tol.newton_tol},
        {"bc_tol", tol.bc_tol},
        {"linear_tol", tol.linear_tol},
        {"tau_boundary", tol.tau_boundary},
        {"tau_speed", tol.tau_speed},
        {"flux_gate_coeff", tol.flux_gate_coeff}}) {
    if (!(value > 0)) fail(std::string("tolerances.") + name + " must be positive");
  }
  if (tol.newton_max_iters < 1) fail("tolerances.newton_max_iters must be at least 1");
  if (tol.linear_max_iter < 1) fail("tolerances.linear_max_iter must be at least 1");
  if (tol.uniqueness_probes < 0) fail("tolerances.uniqueness_probes must be nonnegative");
}

Reference parse_reference(const Json& j) {
  if (!j.is_string()) fail("reference must be a string");
  const std::string name = j.get<std::string>();
  if (name == "none") return Reference::None;
  if (name == "grim_reaper") return Reference::GrimReaper;
  if (name == "spherical_cap") return Reference::SphericalCap;
  if (name == "flat") return Reference::Flat;
  fail("reference must be one of \"none\", \"grim_reaper\", \"spherical_cap\", "
       "\"flat\"; got \"" +
       name + "\"");
}

void parse_output(const Json& j, OutputSpec& out) {
  expect_object(j, "output");
  check_keys(j, "output", {"directory", "prefix"});
  out.directory = get_string(j, "directory", "output", out.directory);
  out.prefix = get_string(j, "prefix", "output", out.prefix);
  if (out.directory.empty()) fail("output.directory must not be empty");
  if (out.prefix.empty()) fail("output.prefix must not be empty");
}

Json series_json(const TrigSeries& s) {
  Json j;
  j["constant"] = s.constant;
  Json cos = Json::array();
  for (const auto& [k, c] : s.cosine) cos.push_back(Json::array({k, c}));
  Json sin = Json::array();
  for (const auto& [k, c] : s.sine) sin.push_back(Json::array({k, c}));
  j["cos"] = cos;
  j["sin"] = sin;
  return j;
}

}  // namespace

ScenarioConfig parse_scenario(const Json& j) {
  expect_object(j, "scenario");
  check_keys(j, "scenario",
             {"schema_version", "name", "domain", "theta", "A", "initial", "scheme",
              "run", "tolerances", "reference", "seed", "output"});
  const int version = get_int(j, "schema_version", "scenario", 1);
  if (version != 1) {
    std::ostringstream msg;
    msg << "unsupported schema_version " << version << " (this build reads version 1)";
    fail(msg.str());
  }
  ScenarioConfig cfg;
  cfg.name = get_string(j, "name", "scenario", cfg.name);
  require_key(j, "domain", "scenario");
  cfg.domain = parse_domain(j.at("domain"));
  require_key(j, "theta", "scenario");
  cfg.theta = parse_theta(j.at("theta"));
  cfg.A = get_real(j, "A", "scenario", 0.0);
  if (j.contains("initial")) cfg.initial = parse_initial(j.at("initial"));
  if (j.contains("scheme")) parse_scheme(j.at("scheme"), cfg);
  if (j.contains("run")) parse_run(j.at("run"), cfg.run);
  if (j.contains("tolerances")) parse_tolerances(j.at("tolerances"), cfg.tol);
  if (j.contains("reference")) cfg.reference = parse_reference(j.at("reference"));
  if (j.contains("seed")) {
    const Json& v = j.at("seed");
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0))
      fail("seed must be a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  if (j.contains("output")) parse_output(j.at("output"), cfg.output);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open \"" + path + "\"");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config: " + path + ": " + std::string(e.what()));
  }
  return parse_scenario(j);
}

Json scenario_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["schema_version"] = 1;
  j["name"] = cfg.name;

  Json domain;
  if (const auto* iv = std::get_if<IntervalSpec>(&cfg.domain)) {
    domain["kind"] = "interval";
    domain["a"] = iv->a;
    domain["b"] = iv->b;
    domain["nodes"] = iv->nodes;
  } else {
    const auto& st = std::get<StarSpec>(cfg.domain);
    domain["kind"] = "star";
    domain["radius"] = series_json(st.radius);
    domain["n_xi"] = st.n_xi;
    domain["n_eta"] = st.n_eta;
    domain["rho_floor"] = st.rho_floor;
  }
  j["domain"] = domain;

  Json theta;
  if (const auto* ct = std::get_if<ConstantTheta>(&cfg.theta)) {
    theta["kind"] = "constant";
    theta["value"] = ct->value;
  } else if (const auto* bs = std::get_if<BoundaryThetaSeries>(&cfg.theta)) {
    const Json body = series_json(bs->series);
    theta["kind"] = "series";
    for (const auto& item : body.items()) theta[item.key()] = item.value();
  } else {
    const auto& ep = std::get<EndpointTheta>(cfg.theta);
    theta["kind"] = "endpoints";
    theta["left"] = ep.left;
    theta["right"] = ep.right;
  }
  j["theta"] = theta;

  j["A"] = cfg.A;

  Json initial;
  switch (cfg.initial.family) {
    case InitialSpec::Family::Zero:
      initial["family"] = "zero";
      break;
    case InitialSpec::Family::Constant:
      initial["family"] = "constant";
      initial["value"] = cfg.initial.value;
      break;
    case InitialSpec::Family::Quadratic:
      initial["family"] = "quadratic";
      initial["coefficient"] = cfg.initial.coefficient;
      break;
    case InitialSpec::Family::Bump:
      initial["family"] = "bump";
      initial["amplitude"] = cfg.initial.amplitude;
      initial["width"] = cfg.initial.width;
      break;
    case InitialSpec::Family::Random:
      initial["family"] = "random";
      initial["amplitude"] = cfg.initial.amplitude;
      initial["max_mode"] = cfg.initial.max_mode;
      initial["terms"] = cfg.initial.terms;
      break;
  }
  j["initial"] = initial;

  Json scheme;
  scheme["kind"] = cfg.scheme == Scheme::Explicit ? "explicit" : "semi_implicit";
  scheme["cfl"] = cfg.cfl;
  scheme["dt"] = cfg.dt_override;
  j["scheme"] = scheme;

  Json run;
  run["mode"] = cfg.run.mode;
  run["horizon"] = cfg.run.horizon;
  run["record_every"] = cfg.run.record_every;
  run["store_snapshots"] = cfg.run.store_snapshots;
  run["snapshot_every"] = cfg.run.snapshot_every;
  run["stop_rules"] = cfg.run.stop_rules;
  run["comparison_pairs"] = cfg.run.comparison_pairs;
  j["run"] = run;

  Json tol;
  tol["eps_stationary"] = cfg.tol.eps_stationary;
  tol["eps_translator"] = cfg.tol.eps_translator;
  tol["tol_c_scale"] = cfg.tol.tol_c_scale;
  tol["tol_I_scale"] = cfg.tol.tol_I_scale;
  tol["newton_tol"] = cfg.tol.newton_tol;
  tol["newton_max_iters"] = cfg.tol.newton_max_iters;
  tol["bc_tol"] = cfg.tol.bc_tol;
  tol["linear_tol"] = cfg.tol.linear_tol;
  tol["linear_max_iter"] = cfg.tol.linear_max_iter;
  tol["tau_boundary"] = cfg.tol.tau_boundary;
  tol["tau_speed"] = cfg.tol.tau_speed;
  tol["uniqueness_probes"] = cfg.tol.uniqueness_probes;
  tol["flux_gate_coeff"] = cfg.tol.flux_gate_coeff;
  j["tolerances"] = tol;

  switch (cfg.reference) {
    case Reference::None: j["reference"] = "none"; break;
    case Reference::GrimReaper: j["reference"] = "grim_reaper"; break;
    case Reference::SphericalCap: j["reference"] = "spherical_cap"; break;
    case Reference::Flat: j["reference"] = "flat"; break;
  }
  j["seed"] = cfg.seed;

  Json out;
  out["directory"] = cfg.output.directory;
  out["prefix"] = cfg.output.prefix;
  j["output"] = out;
  return j;
}

GeometryPtr make_geometry(const ScenarioConfig& cfg) { return build_geometry(cfg.domain); }

ContactAngleField make_theta(const ScenarioConfig& cfg, GeometryPtr geom) {
  return build_contact_angle(std::move(geom), cfg.theta);
}

GridFunction make_initial(const ScenarioConfig& cfg, GeometryPtr geom) {
  const DomainGeometry& g = *geom;
  Vector u = Vector::Zero(g.n_nodes);
  const Vec2 centre =
      g.dim == 1 ? Vec2((g.xa + g.xb) / 2, 0.0) : g.centroid;
  switch (cfg.initial.family) {
    case InitialSpec::Family::Zero:
      break;
    case InitialSpec::Family::Constant:
      u.setConstant(cfg.initial.value);
      break;
    case InitialSpec::Family::Quadratic:
      for (int n = 0; n < g.n_nodes; ++n) {
        const Vec2 x(g.coords(n, 0), g.coords(n, 1));
        u[n] = cfg.initial.coefficient * (x - centre).squaredNorm();
      }
      break;
    case InitialSpec::Family::Bump:
      for (int n = 0; n < g.n_nodes; ++n) {
        const Vec2 x(g.coords(n, 0), g.coords(n, 1));
        const Real r2 = (x - centre).squaredNorm();
        u[n] = cfg.initial.amplitude *
               std::exp(-r2 / (2 * cfg.initial.width * cfg.initial.width));
      }
      break;
    case InitialSpec::Family::Random: {
      Rng rng(cfg.seed);
      u = random_smooth_field(g, rng, cfg.initial.amplitude, cfg.initial.max_mode,
                              cfg.initial.terms);
      break;
    }
  }
  return GridFunction(std::move(geom), std::move(u));
}

FlowParams make_flow_params(const ScenarioConfig& cfg) {
  FlowParams p;
  p.A = cfg.A;
  p.scheme = cfg.scheme;
  p.cfl = cfg.cfl;
  p.dt_override = cfg.dt_override;
  p.linear_tol = cfg.tol.linear_tol;
  p.linear_max_iter = cfg.tol.linear_max_iter;
  p.bc_tol = cfg.tol.bc_tol;
  p.eps_stationary = cfg.tol.eps_stationary;
  p.eps_translator = cfg.tol.eps_translator;
  p.stop_rules = cfg.run.stop_rules;
  return p;
}

Real tol_c(const ScenarioConfig& cfg) {
  return cfg.tol.tol_c_scale * (1 + std::abs(cfg.A));
}

Real tol_I(const ScenarioConfig& cfg, const DomainGeometry& geom) {
  return cfg.tol.tol_I_scale *
         (std::abs(cfg.A) * geom.measure + geom.boundary_length);
}

ReferenceSolution make_reference(const ScenarioConfig& cfg, GeometryPtr geom) {
  ReferenceSolution ref;
  if (cfg.reference == Reference::None) return ref;

  const DomainGeometry& g = *geom;
  const ContactAngleField theta = build_contact_angle(geom, cfg.theta);

  if (cfg.reference == Reference::GrimReaper) {
    if (g.dim != 1) fail("reference \"grim_reaper\" needs an interval domain");
    if (cfg.A != 0) fail("reference \"grim_reaper\" needs A = 0");
    const Real cosL = theta.cos_theta_b[0];
    const Real cosR = theta.cos_theta_b[theta.cos_theta_b.size() - 1];
    if (std::abs(cosL - cosR) > 1e-12)
      fail("reference \"grim_reaper\" needs equal contact angles at both endpoints");
    if (!(cosL > 0))
      fail("reference \"grim_reaper\" needs theta < pi/2 (upward drift)");
    const Real half = (g.xb - g.xa) / 2;
    const Real mid = (g.xa + g.xb) / 2;
    ref.c = std::asin(cosL) / half;
    ref.phi = Vector::Zero(g.n_nodes);
    for (int n = 0; n < g.n_nodes; ++n)
      ref.phi[n] = -std::log(std::cos(ref.c * (g.coords(n, 0) - mid))) / ref.c;
    ref.has_profile = true;
    return ref;
  }

  if (cfg.reference == Reference::SphericalCap) {
    if (g.dim != 2) fail("reference \"spherical_cap\" needs a star domain");
    if (!g.radius.is_constant())
      fail("reference \"spherical_cap\" needs a circular domain (constant radius)");
    if (cfg.A == 0) fail("reference \"spherical_cap\" needs A != 0");
    const Real a = g.radius.constant;
    Real cos0 = theta.cos_theta_b[0];
    for (int b = 0; b < theta.cos_theta_b.size(); ++b)
      if (std::abs(theta.cos_theta_b[b] - cos0) > 1e-12)
        fail("reference \"spherical_cap\" needs a constant contact angle");
    // Stationarity of the cap of radius 2/|A| pins cos(theta) = -A a / 2.
    if (std::abs(cos0 + cfg.A * a / 2) > 1e-9 * (1 + std::abs(cfg.A)))
      fail("reference \"spherical_cap\" needs cos(theta) = -A * radius / 2 "
           "(the stationary compatibility condition)");
    ref.c = 0.0;
    ref.phi = Vector::Zero(g.n_nodes);
    for (int n = 0; n < g.n_nodes; ++n) {
      const Vec2 x(g.coords(n, 0), g.coords(n, 1));
      const Real r2 = (x - g.centroid).squaredNorm();
      ref.phi[n] = (2 / cfg.A) * (std::sqrt(1 - cfg.A * cfg.A * r2 / 4) - 1);
    }
    ref.phi.array() -= ref.phi[g.anchor_node()];
    ref.has_profile = true;
    return ref;
  }

  // Flat: theta = pi/2 everywhere makes u(t) = u0 + A t an exact solution.
  if (theta.cos_theta_b.cwiseAbs().maxCoeff() > 1e-12)
    fail("reference \"flat\" needs theta = pi/2 on the whole boundary");
  ref.c = cfg.A;
  ref.phi = Vector::Zero(g.n_nodes);
  ref.has_profile = true;
  return ref;
}

}  // namespace cylflow
