#include "cylflow/flow.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <sstream>

#include "cylflow/kernels.hpp"
#include "cylflow/operators.hpp"

namespace cylflow {

namespace {

using Triplet = Eigen::Triplet<Real>;

// Frozen-coefficient linear model of the operator: F(u') ~ M u' + q, with the
// coefficient matrix, area element, and ghost slopes held at the current state.
void assemble_frozen(const DomainGeometry& g, const GridFunction& u,
                     const DifferentialSample& s, Real A, std::vector<Triplet>& trip,
                     Vector& q) {
  trip.clear();
  q.setZero(g.n_nodes);

  auto coeffs = [&](int n, Real& axx, Real& axy, Real& ayy) {
    const Real px = s.grad(n, 0), py = s.grad(n, 1);
    const Real vsq = 1.0 + px * px + py * py;
    axx = 1.0 - px * px / vsq;
    axy = -px * py / vsq;
    ayy = 1.0 - py * py / vsq;
  };

  if (g.dim == 1) {
    const Real h = g.h;
    const int n = g.nx;
    // Frozen endpoint slopes from the current ghost layer.
    const Real sl = (u.values[1] - u.ghost[0]) / (2.0 * h);
    const Real sr = (u.ghost[1] - u.values[n - 2]) / (2.0 * h);
    for (int i = 0; i < n; ++i) {
      const Real w = 1.0 / (1.0 + s.grad(i, 0) * s.grad(i, 0));
      q[i] = A * s.v[i];
      if (i == 0) {
        trip.emplace_back(0, 1, 2.0 * w / (h * h));
        trip.emplace_back(0, 0, -2.0 * w / (h * h));
        q[0] += -2.0 * sl * w / h;
      } else if (i == n - 1) {
        trip.emplace_back(i, i - 1, 2.0 * w / (h * h));
        trip.emplace_back(i, i, -2.0 * w / (h * h));
        q[i] += 2.0 * sr * w / h;
      } else {
        trip.emplace_back(i, i - 1, w / (h * h));
        trip.emplace_back(i, i, -2.0 * w / (h * h));
        trip.emplace_back(i, i + 1, w / (h * h));
      }
    }
    return;
  }

  const Real dxi = g.d_xi, deta = g.d_eta;
  const int nb = g.n_xi - 1;

  // Pole row: frozen coefficients against the least-squares Hessian.
  {
    Real axx, axy, ayy;
    coeffs(0, axx, axy, ayy);
    q[0] = A * s.v[0];
    Real diag = 0.0;
    for (size_t k = 0; k < g.pole_fit_nodes.size(); ++k) {
      const Real c = axx * g.pole_fit(2, k) + 2.0 * axy * g.pole_fit(3, k) +
                     ayy * g.pole_fit(4, k);
      trip.emplace_back(0, g.pole_fit_nodes[k], c);
      diag -= c;
    }
    trip.emplace_back(0, 0, diag);
  }

  // Frozen boundary slopes from the current ghosts.
  Vector slope(g.n_eta);
  for (int j = 0; j < g.n_eta; ++j)
    slope[j] =
        (u.ghost[j] - u.values[g.node_index(nb - 1, j)]) / (2.0 * dxi);

  for (int i = 1; i < g.n_xi; ++i) {
    for (int j = 0; j < g.n_eta; ++j) {
      const int n = g.node_index(i, j);
      Real axx, axy, ayy;
      coeffs(n, axx, axy, ayy);
      const Real xx = g.inv_jac(n, 0), xy = g.inv_jac(n, 1);
      const Real ex = g.inv_jac(n, 2), ey = g.inv_jac(n, 3);
      const Real w_xixi = axx * xx * xx + 2.0 * axy * xx * xy + ayy * xy * xy;
      const Real w_etaeta = axx * ex * ex + 2.0 * axy * ex * ey + ayy * ey * ey;
      const Real w_xieta = 2.0 * axx * xx * ex + 2.0 * axy * (xx * ey + xy * ex) +
                           2.0 * ayy * xy * ey;
      const Real w_xi = axx * g.chain2(n, 0) + 2.0 * axy * g.chain2(n, 1) +
                        ayy * g.chain2(n, 2);
      const Real w_eta = axx * g.chain2(n, 3) + 2.0 * axy * g.chain2(n, 4) +
                         ayy * g.chain2(n, 5);
      q[n] = A * s.v[n];

      const int jp = g.node_index(i, j + 1), jm = g.node_index(i, j - 1);
      trip.emplace_back(n, jp, w_etaeta / (deta * deta) + w_eta / (2.0 * deta));
      trip.emplace_back(n, jm, w_etaeta / (deta * deta) - w_eta / (2.0 * deta));
      trip.emplace_back(n, n, -2.0 * w_etaeta / (deta * deta));

      if (i < nb) {
        const int ip = g.node_index(i + 1, j), im = g.node_index(i - 1, j);
        trip.emplace_back(n, ip, w_xixi / (dxi * dxi) + w_xi / (2.0 * dxi));
        trip.emplace_back(n, im, w_xixi / (dxi * dxi) - w_xi / (2.0 * dxi));
        trip.emplace_back(n, n, -2.0 * w_xixi / (dxi * dxi));
        const Real c = w_xieta / (4.0 * dxi * deta);
        trip.emplace_back(n, g.node_index(i + 1, j + 1), c);
        trip.emplace_back(n, g.node_index(i - 1, j - 1), c);
        trip.emplace_back(n, g.node_index(i + 1, j - 1), -c);
        trip.emplace_back(n, g.node_index(i - 1, j + 1), -c);
      } else {
        // Boundary row: radial second difference through the frozen ghost; the
        // first derivative and the cross term are frozen constants.
        const int im = g.node_index(i - 1, j);
        trip.emplace_back(n, im, 2.0 * w_xixi / (dxi * dxi));
        trip.emplace_back(n, n, -2.0 * w_xixi / (dxi * dxi));
        const int jp1 = (j + 1) % g.n_eta, jm1 = (j + g.n_eta - 1) % g.n_eta;
        q[n] += w_xixi * 2.0 * slope[j] / dxi + w_xi * slope[j] +
                w_xieta * (slope[jp1] - slope[jm1]) / (2.0 * deta);
      }
    }
  }
}

}  // namespace

Real stable_dt(const DomainGeometry& geom, int dim, Real cfl) {
  const Real h = geom.min_node_spacing;
  return cfl * h * h / (2.0 * dim);
}

Real auto_dt(const DomainGeometry& geom, const FlowParams& p) {
  if (p.dt_override > 0.0) return p.dt_override;
  if (p.scheme == Scheme::Explicit) return stable_dt(geom, geom.dim, p.cfl);
  return p.cfl * geom.min_radial_spacing;
}

StepReport step(FlowState& state, const ContactAngleField& theta, const FlowParams& p,
                Real dt) {
  const DomainGeometry& g = *state.u.geom;
  if (!state.u.ghost_valid) enforce_contact_bc(state.u, theta);
  StepReport rep;
  rep.dt = dt;

  const Vector u_old = state.u.values;
  const DifferentialSample s = differentiate(state.u);

  if (p.scheme == Scheme::Explicit) {
    const Vector rhs = interior_operator(s, p.A);
    state.u.values += dt * rhs;
  } else {
    static thread_local std::vector<Triplet> trip;
    Vector q;
    assemble_frozen(g, state.u, s, p.A, trip, q);
    Eigen::SparseMatrix<Real> sys(g.n_nodes, g.n_nodes);
    // System matrix Id - dt M.
    for (auto& t : trip) t = Triplet(t.row(), t.col(), -dt * t.value());
    sys.setFromTriplets(trip.begin(), trip.end());
    for (int n = 0; n < g.n_nodes; ++n) sys.coeffRef(n, n) += 1.0;
    sys.makeCompressed();

    Eigen::BiCGSTAB<Eigen::SparseMatrix<Real>> solver;
    solver.setTolerance(p.linear_tol);
    solver.setMaxIterations(p.linear_max_iter);
    solver.compute(sys);
    const Vector rhs = u_old + dt * q;
    const Vector u_new = solver.solveWithGuess(rhs, u_old);
    if (solver.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "semi-implicit linear solve failed at t = " << state.t
          << " (iterations " << solver.iterations() << ", error " << solver.error()
          << ")";
      throw solver_error(msg.str());
    }
    rep.linear_iterations = static_cast<int>(solver.iterations());
    state.u.values = u_new;
  }

  if (!state.u.values.allFinite()) {
    std::ostringstream msg;
    msg << "flow state lost finiteness at t = " << state.t + dt
        << " (step " << (p.scheme == Scheme::Explicit ? "explicit" : "semi-implicit")
        << ", dt = " << dt << ")";
    throw solver_error(msg.str());
  }

  state.u.ghost_valid = false;
  const BcReport bc = enforce_contact_bc(state.u, theta);
  if (bc.max_residual > p.bc_tol) {
    std::ostringstream msg;
    msg << "contact-angle closure residual " << bc.max_residual
        << " exceeded tolerance " << p.bc_tol << " at t = " << state.t + dt;
    throw solver_error(msg.str());
  }
  rep.bc_residual = bc.max_residual;
  state.last_bc_residual = bc.max_residual;
  state.ut = (state.u.values - u_old) / dt;
  state.ut_valid = true;
  state.t += dt;
  return rep;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Stationary: return "stationary";
    case StopReason::Translator: return "translator";
    default: return "horizon";
  }
}

namespace {

DiagnosticsRecord make_record(const FlowState& state, const ContactAngleField& theta,
                              Real A) {
  const DomainGeometry& g = *state.u.geom;
  const DifferentialSample s = differentiate(state.u);
  const AuxQuantities aux = aux_quantities(s, state.u, theta);
  DiagnosticsRecord r;
  r.t = state.t;
  r.E = energy(s, state.u, theta, A);
  r.sup_grad = s.grad.rowwise().norm().maxCoeff();
  r.sup_ut = state.ut.cwiseAbs().maxCoeff();
  r.c_inst = quadrature(g, state.ut) / g.measure;
  r.max_w = aux.max_w;
  r.min_w = aux.min_w;
  r.max_phi = aux.max_phi;
  r.bc_residual = state.last_bc_residual;
  r.dissipation = quadrature(g, (state.ut.array().square() / s.v.array()).matrix());
  r.u_anchor = state.u.values[g.anchor_node()];
  return r;
}

}  // namespace

Trajectory run_flow(GridFunction u0, const ContactAngleField& theta, const FlowParams& p,
                    Real horizon, const RecorderOptions& rec) {
  if (!u0.values.allFinite()) throw solver_error("initial data is not finite");
  const DomainGeometry& g = *u0.geom;

  Trajectory traj;
  traj.I = compute_I(g, theta, p.A);
  traj.initial_bc_residual =
      contact_bc_residual_one_sided(u0, theta).cwiseAbs().maxCoeff();

  FlowState state;
  state.u = std::move(u0);
  const BcReport bc0 = enforce_contact_bc(state.u, theta);
  state.last_bc_residual = bc0.max_residual;
  // Record zero carries the instantaneous velocity of the closed initial data.
  state.ut = interior_operator(state.u, p.A);
  state.ut_valid = true;

  const Real dt = auto_dt(g, p);
  traj.dt = dt;
  const long total = static_cast<long>(std::ceil(horizon / dt - 1e-12));
  const Real scale = 1.0 + std::abs(p.A);

  auto push_record = [&](bool on_cadence) {
    traj.records.push_back(make_record(state, theta, p.A));
    if (on_cadence) {
      traj.prev_profile = traj.last_profile;
      traj.prev_profile_t = traj.last_profile_t;
      traj.last_profile = state.u.values;
      traj.last_profile_t = state.t;
      const long ordinal = static_cast<long>(traj.records.size()) - 1;
      if (rec.store_snapshots && ordinal % std::max(1, rec.snapshot_every) == 0)
        traj.snapshots.emplace_back(state.t, state.u.values);
    }
  };

  push_record(true);

  for (long k = 1; k <= total; ++k) {
    step(state, theta, p, dt);
    traj.steps = static_cast<int>(k);
    const bool cadence = (k % std::max(1, rec.record_every)) == 0;
    const bool last = k == total;
    if (!cadence && !last) continue;
    push_record(cadence);

    if (p.stop_rules) {
      const Real sup_ut = traj.records.back().sup_ut;
      if (sup_ut < p.eps_stationary * scale) {
        traj.stop = StopReason::Stationary;
        break;
      }
      const Real c = traj.records.back().c_inst;
      const Real dev = (state.ut.array() - c).abs().maxCoeff();
      // A translator must be moving at a speed distinguishable from zero at
      // the same tolerance; otherwise a decay to rest would trip this (looser)
      // gate before the stationary one.
      if (dev < p.eps_translator * scale && std::abs(c) > p.eps_translator * scale) {
        traj.stop = StopReason::Translator;
        break;
      }
    }
  }

  traj.final_state = std::move(state);
  return traj;
}

ComparisonReport comparison_test(GridFunction lower, GridFunction upper,
                                 const ContactAngleField& theta, const FlowParams& p,
                                 Real horizon, const RecorderOptions& rec) {
  if (lower.geom != upper.geom)
    throw std::invalid_argument("comparison_test: states live on different grids");
  ComparisonReport out;

  FlowState a, b;
  a.u = std::move(lower);
  b.u = std::move(upper);
  enforce_contact_bc(a.u, theta);
  enforce_contact_bc(b.u, theta);

  const Real dt = auto_dt(*a.u.geom, p);
  const long total = static_cast<long>(std::ceil(horizon / dt - 1e-12));

  auto inspect = [&]() {
    const Real viol = (a.u.values - b.u.values).maxCoeff();
    out.worst_violation = std::max(out.worst_violation, viol);
    out.max_sup_upper = std::max(out.max_sup_upper, b.u.values.cwiseAbs().maxCoeff());
    ++out.records;
  };
  inspect();
  for (long k = 1; k <= total; ++k) {
    step(a, theta, p, dt);
    step(b, theta, p, dt);
    if (k % std::max(1, rec.record_every) == 0 || k == total) inspect();
  }
  out.ordered = out.worst_violation <= 0.0;
  return out;
}

ShiftComparisonReport time_shift_comparison(const Trajectory& traj, Real min_gap) {
  ShiftComparisonReport out;
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 3) return out;

  size_t shift = 0;
  for (size_t m = 1; m < snaps.size(); ++m) {
    const Real gap = (snaps[m].second - snaps[0].second).minCoeff();
    if (gap >= min_gap) {
      shift = m;
      out.gap = gap;
      break;
    }
  }
  if (shift == 0) return out;
  out.applicable = true;
  out.period = snaps[shift].first - snaps[0].first;
  for (size_t k = 0; k + shift < snaps.size(); ++k) {
    const Real gap_k = (snaps[k + shift].second - snaps[k].second).minCoeff();
    out.worst_violation = std::max(out.worst_violation, min_gap - gap_k);
  }
  return out;
}

}  // namespace cylflow
