#pragma once

#include <string>
#include <vector>

#include "cylflow/contact_angle.hpp"
#include "cylflow/fields.hpp"

namespace cylflow {

// The solvability/trichotomy functional I = A |Omega| + integral of cos(theta)
// over the boundary, evaluated with the discrete measures. Its sign decides
// whether graphs drift up (I > 0), settle (I = 0), or drift down (I < 0).
Real compute_I(const DomainGeometry& geom, const ContactAngleField& theta, Real A);

// Dirichlet-type energy E[u] = integral (v - A u) - boundary integral u cos(theta).
// Along the flow dE/dt = -integral u_t^2 / v <= 0, and shifting u by a constant
// h changes E by exactly -h I.
Real energy(const DifferentialSample& s, const GridFunction& u,
            const ContactAngleField& theta, Real A);
Real energy(GridFunction u, const ContactAngleField& theta, Real A);

// alpha0/2 = 1 + (2n-1) ||theta||_C1(boundary) / inf sin^3(theta)
//              + kappa0 / inf sin^2(theta) + sup|D^2 d| / inf sin^2(theta).
Real alpha0_formula(int dim, Real sin_min, Real theta_c1, Real kappa0, Real d2d_sup);

// Boundary-adapted gradient auxiliaries: w = v + (Du . Dd) cos(theta) and
// phi = log w + alpha0 d. w is pinched between (1 - s0) v and 2 v.
struct AuxQuantities {
  Vector w;
  Vector phi;
  Real alpha0 = 0;
  Real max_w = 0, min_w = 0, max_phi = 0;
  Real sandwich_lo_margin = 0;  // min over nodes of w - (1 - s0) v
  Real sandwich_hi_margin = 0;  // min over nodes of 2 v - w
};
AuxQuantities aux_quantities(const DifferentialSample& s, const GridFunction& u,
                             const ContactAngleField& theta);

// One row of the flow trajectory.
struct DiagnosticsRecord {
  Real t = 0;
  Real E = 0;
  Real sup_grad = 0;
  Real sup_ut = 0;
  Real c_inst = 0;  // area-mean of u_t: instantaneous drift speed estimate
  Real max_w = 0, min_w = 0, max_phi = 0;
  Real bc_residual = 0;
  Real dissipation = 0;  // integral u_t^2 / v
  Real u_anchor = 0;     // u at the anchor node
};

struct DissipationCheck {
  bool passed = true;
  Real max_step_increase = 0;   // worst E(t+) - E(t) over records
  Real max_rel_mismatch = 0;    // worst |dE/dt + dissipation| / scale
  int intervals = 0;
};
// Compares interval-averaged dE/dt against the recorded -integral u_t^2/v.
// rel_tol covers the O(dt + h^2) commutator; increase_tol the monotonicity slack.
DissipationCheck energy_dissipation_check(const std::vector<DiagnosticsRecord>& records,
                                          Real rel_tol = 0.05,
                                          Real increase_tol_scale = 1e-8);

struct ConditionReport {
  std::string id;
  bool applicable = true;
  bool holds = false;
  Real margin = 0;
  std::string detail;  // inputs and conventions that produced the margin
};
// Structural sufficient conditions on (domain, theta, A); quantities involving
// theta derivatives use boundary-restricted arc-length seminorms (recorded in
// the detail string).
std::vector<ConditionReport> check_conditions(const DomainGeometry& geom,
                                              const ContactAngleField& theta, Real A,
                                              Real tau_boundary = 0.1,
                                              Real tau_speed = 3.0);

enum class Verdict { Upward, Stationary, Downward };
const char* verdict_name(Verdict v);

struct Classification {
  Verdict verdict = Verdict::Stationary;   // from the observed drift speed
  Verdict predicted = Verdict::Stationary; // from the sign of I
  bool consistent = true;
  Real c_est = 0, I = 0, tol_c = 0, tol_I = 0;
};
Classification classify_trichotomy(Real c_est, Real I, Real tol_c, Real tol_I);

}  // namespace cylflow
