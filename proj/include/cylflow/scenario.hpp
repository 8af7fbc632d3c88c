#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "cylflow/contact_angle.hpp"
#include "cylflow/fields.hpp"
#include "cylflow/flow.hpp"

namespace cylflow {

using Json = nlohmann::ordered_json;

// Initial-data families; all centred on the domain's midpoint/centroid.
struct InitialSpec {
  enum class Family { Zero, Constant, Quadratic, Bump, Random } family = Family::Zero;
  Real value = 0.0;        // Constant
  Real coefficient = 0.0;  // Quadratic: coefficient * |x - centre|^2
  Real amplitude = 0.0;    // Bump / Random
  Real width = 0.25;       // Bump
  int max_mode = 2;        // Random
  int terms = 4;           // Random
};

enum class Reference { None, GrimReaper, SphericalCap, Flat };

struct RunSpec {
  std::string mode = "flow";  // "flow" or "comparison"
  Real horizon = 10.0;
  int record_every = 100;
  bool store_snapshots = false;
  int snapshot_every = 1;
  bool stop_rules = true;
  int comparison_pairs = 20;  // mode "comparison"
};

struct ToleranceSpec {
  Real eps_stationary = 1e-7;
  Real eps_translator = 1e-6;
  Real tol_c_scale = 1e-4;   // tol_c = tol_c_scale * (1 + |A|)
  Real tol_I_scale = 1e-6;   // tol_I = tol_I_scale * (|A| |Omega| + |bdry|)
  Real newton_tol = 1e-9;
  int newton_max_iters = 25;
  Real bc_tol = 1e-10;
  Real linear_tol = 1e-10;
  int linear_max_iter = 2000;
  Real tau_boundary = 0.1;  // condition (ii) threshold
  Real tau_speed = 3.0;     // condition (iii) threshold
  int uniqueness_probes = 3;
  Real flux_gate_coeff = 10.0;  // flux identity gate: coeff * h^2 * scale
};

struct OutputSpec {
  std::string directory = "out";
  std::string prefix = "run";
};

struct ScenarioConfig {
  std::string name = "scenario";
  DomainSpec domain;
  ThetaSpec theta = ConstantTheta{std::numbers::pi_v<Real> / 2};
  Real A = 0.0;
  InitialSpec initial;
  Scheme scheme = Scheme::Explicit;
  Real cfl = 0.5;
  Real dt_override = 0.0;
  RunSpec run;
  ToleranceSpec tol;
  Reference reference = Reference::None;
  std::uint64_t seed = 1;
  OutputSpec output;
};

// Strict parse: unknown keys anywhere are an error naming the key; types and
// ranges are validated up front.
ScenarioConfig parse_scenario(const Json& j);
ScenarioConfig load_scenario_file(const std::string& path);
Json scenario_to_json(const ScenarioConfig& cfg);  // resolved-config echo

GeometryPtr make_geometry(const ScenarioConfig& cfg);
ContactAngleField make_theta(const ScenarioConfig& cfg, GeometryPtr geom);
GridFunction make_initial(const ScenarioConfig& cfg, GeometryPtr geom);
FlowParams make_flow_params(const ScenarioConfig& cfg);

Real tol_c(const ScenarioConfig& cfg);
Real tol_I(const ScenarioConfig& cfg, const DomainGeometry& geom);

// Closed-form references for the error/convergence studies.
struct ReferenceSolution {
  bool has_profile = false;
  Vector phi;  // anchored at the geometry anchor node
  Real c = 0.0;
};
ReferenceSolution make_reference(const ScenarioConfig& cfg, GeometryPtr geom);

}  // namespace cylflow
