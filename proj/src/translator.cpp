#include "cylflow/translator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cylflow/operators.hpp"
#include "cylflow/rng.hpp"

namespace cylflow {

Vector random_smooth_field(const DomainGeometry& geom, Rng& rng, Real amplitude,
                           int max_mode, int terms) {
  Vector out = Vector::Zero(geom.n_nodes);
  for (int m = 0; m < terms; ++m) {
    Real kx = 0, ky = 0;
    do {
      kx = rng.uniform_int(-max_mode, max_mode);
      ky = geom.dim == 1 ? 0 : rng.uniform_int(-max_mode, max_mode);
    } while (kx == 0 && ky == 0);
    const Real amp = rng.uniform(-1.0, 1.0);
    const Real phase = rng.uniform(0.0, 2.0 * std::numbers::pi_v<Real>);
    for (int n = 0; n < geom.n_nodes; ++n)
      out[n] += amp * std::cos(kx * geom.coords(n, 0) + ky * geom.coords(n, 1) + phase);
  }
  return amplitude * out;
}

namespace {

// Residual of the translator system at (phi, c); N PDE rows plus the anchor.
Vector translator_residual(const GeometryPtr& geom, const ContactAngleField& theta,
                           Real A, int anchor, const Vector& phi, Real c) {
  GridFunction u(geom, phi);
  enforce_contact_bc(u, theta);
  const Vector f = interior_operator(u, A);
  Vector r(geom->n_nodes + 1);
  r.head(geom->n_nodes) = Vector::Constant(geom->n_nodes, c) - f;
  r[geom->n_nodes] = phi[anchor];
  return r;
}

}  // namespace

TranslatorSolution solve_translator(GeometryPtr geom, const ContactAngleField& theta,
                                    Real A, const TranslatorOptions& opts) {
  const int n = geom->n_nodes;
  if (n + 1 > 12000)
    throw config_error(
        "translator solve uses a dense Jacobian; grids beyond ~12k nodes are not "
        "supported — pick a coarser resolution");

  const int anchor = opts.anchor >= 0 ? opts.anchor : geom->anchor_node();
  Vector phi = opts.phi_init ? *opts.phi_init : Vector::Zero(n);
  Real c = opts.has_c_init ? opts.c_init : compute_I(*geom, theta, A) / geom->measure;

  TranslatorSolution sol;
  sol.anchor = anchor;

  Vector r = translator_residual(geom, theta, A, anchor, phi, c);
  Real r_inf = r.cwiseAbs().maxCoeff();
  int iter = 0;

  Eigen::MatrixXd jac(n + 1, n + 1);
  while (r_inf > opts.newton_tol && iter < opts.max_iters) {
    // Forward-difference Jacobian, one residual evaluation per column.
    for (int k = 0; k < n; ++k) {
      const Real dp = opts.fd_step * (1.0 + std::abs(phi[k]));
      Vector phi_p = phi;
      phi_p[k] += dp;
      jac.col(k) = (translator_residual(geom, theta, A, anchor, phi_p, c) - r) / dp;
    }
    {
      const Real dc = opts.fd_step * (1.0 + std::abs(c));
      jac.col(n) = (translator_residual(geom, theta, A, anchor, phi, c + dc) - r) / dc;
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const Vector delta = lu.solve(-r);
    if (!delta.allFinite()) break;

    // Backtracking on the Euclidean norm.
    const Real r_norm = r.norm();
    Real alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1.0 / 64.0) {
      const Vector phi_try = phi + alpha * delta.head(n);
      const Real c_try = c + alpha * delta[n];
      Vector r_try;
      bool ok = true;
      try {
        r_try = translator_residual(geom, theta, A, anchor, phi_try, c_try);
      } catch (const solver_error&) {
        ok = false;
      }
      if (ok && r_try.allFinite() && r_try.norm() <= (1.0 - 1e-4 * alpha) * r_norm) {
        phi = phi_try;
        c = c_try;
        r = std::move(r_try);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++iter;
    if (!accepted) break;
    r_inf = r.cwiseAbs().maxCoeff();
  }

  // Exact re-anchoring (the Newton anchor row only reaches tolerance level).
  phi.array() -= phi[anchor];
  sol.phi = GridFunction(geom, phi);
  const BcReport bc = enforce_contact_bc(sol.phi, theta);
  sol.bc_residual = bc.max_residual;
  sol.c = c;
  sol.iterations = iter;
  sol.residual_inf = r_inf;
  sol.converged = r_inf <= opts.newton_tol;
  return sol;
}

SpeedEstimate extract_speed_from_flow(const Trajectory& traj) {
  SpeedEstimate est;
  const auto& recs = traj.records;
  if (recs.size() < 2) return est;

  if (traj.stop != StopReason::Horizon) {
    // A stop rule certified the asymptotic regime (u_t uniformly small, or
    // uniformly equal to its mean), so the final instantaneous mean speed is
    // the estimator; a tail fit would still average over the transient.
    est.c = recs.back().c_inst;
    est.window = 1;
  } else {
    const size_t window = std::max<size_t>(2, recs.size() / 5);
    const size_t first = recs.size() - window;
    // Least-squares slope of u(anchor, t) over the window.
    Real st = 0, su = 0, stt = 0, stu = 0;
    for (size_t k = first; k < recs.size(); ++k) {
      st += recs[k].t;
      su += recs[k].u_anchor;
      stt += recs[k].t * recs[k].t;
      stu += recs[k].t * recs[k].u_anchor;
    }
    const Real m = static_cast<Real>(window);
    const Real denom = m * stt - st * st;
    est.c = denom != 0.0 ? (m * stu - st * su) / denom : recs.back().c_inst;
    est.window = static_cast<int>(window);
  }

  if (traj.prev_profile.size() == traj.last_profile.size() &&
      traj.last_profile.size() > 0) {
    // Drift is a modulo-constants seminorm; re-centre at the run's anchor node
    // when the trajectory carries a geometry, at node 0 otherwise.
    const int anchor =
        traj.final_state.u.geom ? traj.final_state.u.geom->anchor_node() : 0;
    const Vector a = traj.last_profile.array() - traj.last_profile[anchor];
    const Vector b = traj.prev_profile.array() - traj.prev_profile[anchor];
    est.profile_drift = (a - b).cwiseAbs().maxCoeff();
  }
  return est;
}

FluxIdentityReport verify_flux_identity(const TranslatorSolution& sol,
                                        const ContactAngleField& theta, Real A) {
  const DomainGeometry& g = *sol.phi.geom;
  GridFunction phi = sol.phi;
  if (!phi.ghost_valid) enforce_contact_bc(phi, theta);
  const DifferentialSample s = differentiate(phi);
  FluxIdentityReport rep;
  rep.lhs = sol.c * quadrature(g, s.v.cwiseInverse());
  rep.rhs = compute_I(g, theta, A);
  rep.mismatch = std::abs(rep.lhs - rep.rhs);
  const Real scale = std::abs(A) * g.measure + g.boundary_length;
  rep.rel_mismatch = rep.mismatch / scale;
  return rep;
}

UniquenessReport uniqueness_probe(GeometryPtr geom, const ContactAngleField& theta,
                                  Real A, int k, std::uint64_t seed,
                                  const TranslatorOptions& opts) {
  UniquenessReport rep;
  rep.attempts = k;
  Rng rng(seed);
  const Real c_flat = compute_I(*geom, theta, A) / geom->measure;

  Vector phi_ref;
  Real c_ref = 0;
  for (int trial = 0; trial < k; ++trial) {
    TranslatorOptions o = opts;
    Vector init = random_smooth_field(*geom, rng, 0.5);
    o.phi_init = &init;
    o.has_c_init = true;
    o.c_init = c_flat + rng.uniform(-0.5, 0.5);
    const TranslatorSolution sol = solve_translator(geom, theta, A, o);
    if (!sol.converged) continue;
    ++rep.converged;
    if (rep.converged == 1) {
      phi_ref = sol.phi.values;
      c_ref = sol.c;
      continue;
    }
    rep.max_c_spread = std::max(rep.max_c_spread, std::abs(sol.c - c_ref));
    rep.max_profile_spread = std::max(
        rep.max_profile_spread, (sol.phi.values - phi_ref).cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace cylflow
