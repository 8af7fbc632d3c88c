#pragma once

#include "cylflow/contact_angle.hpp"
#include "cylflow/fields.hpp"
#include "cylflow/flow.hpp"

namespace cylflow {

struct TranslatorOptions {
  Real newton_tol = 1e-9;  // on the sup norm of the residual
  int max_iters = 25;
  Real fd_step = 1e-7;  // forward-difference scale for the Jacobian columns
  int anchor = -1;      // -1: the geometry's anchor node
  bool has_c_init = false;
  Real c_init = 0.0;           // default: I / |Omega|
  const Vector* phi_init = nullptr;  // default: zero
};

// A translating profile: u(x, t) = phi(x) + c t solves the flow iff
// c = a^ij(Dphi) D_ij phi + A v pointwise with the contact-angle closure.
// Unknowns (phi, c) with phi pinned to zero at the anchor node; the residual
// rows are the PDE at every node (ghosts eliminated through the closure, so
// the boundary condition holds exactly) plus the anchor row. This is the same
// discrete operator the flow integrates, so a converged solution is exactly
// the flow's relative fixed point.
struct TranslatorSolution {
  GridFunction phi;
  Real c = 0.0;
  int iterations = 0;
  Real residual_inf = 0.0;
  Real bc_residual = 0.0;
  bool converged = false;
  int anchor = 0;
};

TranslatorSolution solve_translator(GeometryPtr geom, const ContactAngleField& theta,
                                    Real A, const TranslatorOptions& opts = {});

// Drift speed read off a finished flow: least-squares slope of the anchored
// node value over the trailing fifth of the records, plus the sup-distance of
// the last two anchored profiles.
struct SpeedEstimate {
  Real c = 0.0;
  Real profile_drift = 0.0;
  int window = 0;  // records in the fit
};
SpeedEstimate extract_speed_from_flow(const Trajectory& traj);

// c * integral(1/v) must equal I for a translator: the discrete residual of
// that identity, with the natural scale for relative reporting.
struct FluxIdentityReport {
  Real lhs = 0.0;  // c * integral of 1/v
  Real rhs = 0.0;  // I
  Real mismatch = 0.0;
  Real rel_mismatch = 0.0;
};
FluxIdentityReport verify_flux_identity(const TranslatorSolution& sol,
                                        const ContactAngleField& theta, Real A);

// Re-solve from k randomized starting points; the translator is unique up to
// vertical shifts, so speeds and anchored profiles must coincide.
struct UniquenessReport {
  int attempts = 0;
  int converged = 0;
  Real max_c_spread = 0.0;
  Real max_profile_spread = 0.0;
};
UniquenessReport uniqueness_probe(GeometryPtr geom, const ContactAngleField& theta,
                                  Real A, int k, std::uint64_t seed,
                                  const TranslatorOptions& opts = {});

}  // namespace cylflow
