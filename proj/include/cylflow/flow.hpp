#pragma once

#include <vector>

#include "cylflow/diagnostics.hpp"
#include "cylflow/fields.hpp"

namespace cylflow {

enum class Scheme { Explicit, SemiImplicit };

struct FlowParams {
  Real A = 0.0;
  Scheme scheme = Scheme::Explicit;
  Real cfl = 0.5;
  Real dt_override = 0.0;  // > 0: use this step instead of the automatic one
  Real linear_tol = 1e-10;
  int linear_max_iter = 2000;
  Real bc_tol = 1e-10;
  Real eps_stationary = 1e-7;  // sup|u_t| < eps (1+|A|) stops the run
  Real eps_translator = 1e-6;  // sup|u_t - mean u_t| < eps (1+|A|) stops the run
  bool stop_rules = true;      // false: always run to the horizon
};

// Parabolic CFL bound for the explicit scheme: cfl * h^2 / (2 dim), with h the
// smallest physical edge. The metric eigenvalues of the coefficient matrix are
// at most one, so lambda = 1 in the bound.
Real stable_dt(const DomainGeometry& geom, int dim, Real cfl);

// Step size actually used by run_flow: the CFL bound for the explicit scheme;
// cfl times the smallest radial spacing for the semi-implicit one (accuracy
// scale, the scheme itself is unconditionally stable).
Real auto_dt(const DomainGeometry& geom, const FlowParams& p);

struct FlowState {
  GridFunction u;
  Real t = 0.0;
  Vector ut;  // last difference quotient (u_new - u_old) / dt
  bool ut_valid = false;
  Real last_bc_residual = 0.0;
};

struct StepReport {
  Real dt = 0.0;
  Real bc_residual = 0.0;
  int linear_iterations = 0;  // semi-implicit only
};

// One time step, in place. Ghosts must be closed on entry (run_flow keeps this
// invariant); they are re-closed on the updated values before returning.
StepReport step(FlowState& state, const ContactAngleField& theta, const FlowParams& p,
                Real dt);

enum class StopReason { Horizon, Stationary, Translator };
const char* stop_reason_name(StopReason r);

struct RecorderOptions {
  int record_every = 100;      // steps between trajectory records
  bool store_snapshots = false;
  int snapshot_every = 1;      // records between stored profiles
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<std::pair<Real, Vector>> snapshots;
  // The last two recorded profiles are always kept (drift diagnostics).
  Vector last_profile, prev_profile;
  Real last_profile_t = 0.0, prev_profile_t = 0.0;
  StopReason stop = StopReason::Horizon;
  Real I = 0.0;  // constant along the run; recorded once
  Real dt = 0.0;
  int steps = 0;
  Real initial_bc_residual = 0.0;  // one-sided residual of the raw initial data
  FlowState final_state;
};

Trajectory run_flow(GridFunction u0, const ContactAngleField& theta, const FlowParams& p,
                    Real horizon, const RecorderOptions& rec = {});

struct ComparisonReport {
  bool ordered = true;
  Real worst_violation = 0.0;  // max over records and nodes of (lower - upper)
  Real max_sup_upper = 0.0;    // max over records of |upper|_inf (tolerance scale)
  int records = 0;
};
// Evolve the ordered pair (lower <= upper) in lockstep with a shared step size
// and report the worst ordering violation at the record times.
ComparisonReport comparison_test(GridFunction lower, GridFunction upper,
                                 const ContactAngleField& theta, const FlowParams& p,
                                 Real horizon, const RecorderOptions& rec = {});

struct ShiftComparisonReport {
  bool applicable = false;  // found a record pair with the requested gap
  Real period = 0.0;        // time offset T realizing the gap
  Real gap = 0.0;           // verified min of u(t0+T) - u(t0)
  Real worst_violation = 0.0;  // max over t of gap - min(u(t+T) - u(t))
};
// Time-shifted self-comparison on a recorded trajectory with snapshots: once
// u(., t0+T) >= u(., t0) + gap holds, u(., t+T) >= u(., t) + gap must persist.
ShiftComparisonReport time_shift_comparison(const Trajectory& traj, Real min_gap);

}  // namespace cylflow
