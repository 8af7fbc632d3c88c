#include "cylflow/operators.hpp"

#include <cmath>
#include <sstream>

#include "cylflow/kernels.hpp"

namespace cylflow {

namespace {

// Derivatives in reference coordinates at one 2d node, boundary handled by the
// caller's choice of radial stencil.
struct RefDerivs {
  Real u_xi, u_eta, u_xixi, u_etaeta, u_xieta;
};

void push_physical(const DomainGeometry& g, int n, const RefDerivs& r,
                   DifferentialSample& out) {
  const Real xx = g.inv_jac(n, 0), xy = g.inv_jac(n, 1);
  const Real ex = g.inv_jac(n, 2), ey = g.inv_jac(n, 3);
  out.grad(n, 0) = xx * r.u_xi + ex * r.u_eta;
  out.grad(n, 1) = xy * r.u_xi + ey * r.u_eta;
  out.hess(n, 0) = xx * xx * r.u_xixi + 2.0 * xx * ex * r.u_xieta + ex * ex * r.u_etaeta +
                   g.chain2(n, 0) * r.u_xi + g.chain2(n, 3) * r.u_eta;
  out.hess(n, 1) = xx * xy * r.u_xixi + (xx * ey + xy * ex) * r.u_xieta +
                   ex * ey * r.u_etaeta + g.chain2(n, 1) * r.u_xi +
                   g.chain2(n, 4) * r.u_eta;
  out.hess(n, 2) = xy * xy * r.u_xixi + 2.0 * xy * ey * r.u_xieta + ey * ey * r.u_etaeta +
                   g.chain2(n, 2) * r.u_xi + g.chain2(n, 5) * r.u_eta;
}

void pole_derivs(const DomainGeometry& g, const Vector& u, DifferentialSample& out) {
  Eigen::VectorXd delta(g.pole_fit_nodes.size());
  for (size_t k = 0; k < g.pole_fit_nodes.size(); ++k)
    delta[k] = u[g.pole_fit_nodes[k]] - u[0];
  const Eigen::VectorXd fit = g.pole_fit * delta;
  out.grad(0, 0) = fit[0];
  out.grad(0, 1) = fit[1];
  out.hess(0, 0) = fit[2];
  out.hess(0, 1) = fit[3];
  out.hess(0, 2) = fit[4];
}

DifferentialSample differentiate_2d(const GridFunction& uf, bool use_ghost) {
  const DomainGeometry& g = *uf.geom;
  const Vector& u = uf.values;
  DifferentialSample out;
  out.grad.resize(g.n_nodes, 2);
  out.hess.resize(g.n_nodes, 3);
  out.v.resize(g.n_nodes);

  pole_derivs(g, u, out);

  auto val = [&](int i, int j) { return u[g.node_index(i, j)]; };
  auto ghost = [&](int j) {
    j %= g.n_eta;
    if (j < 0) j += g.n_eta;
    return uf.ghost[j];
  };
  const Real dxi = g.d_xi, deta = g.d_eta;
  const int nb = g.n_xi - 1;

  for (int i = 1; i < g.n_xi; ++i) {
    for (int j = 0; j < g.n_eta; ++j) {
      const int n = g.node_index(i, j);
      RefDerivs r;
      r.u_eta = (val(i, j + 1) - val(i, j - 1)) / (2.0 * deta);
      r.u_etaeta = (val(i, j + 1) - 2.0 * val(i, j) + val(i, j - 1)) / (deta * deta);
      if (i < nb) {
        r.u_xi = (val(i + 1, j) - val(i - 1, j)) / (2.0 * dxi);
        r.u_xixi = (val(i + 1, j) - 2.0 * val(i, j) + val(i - 1, j)) / (dxi * dxi);
        r.u_xieta = (val(i + 1, j + 1) - val(i + 1, j - 1) - val(i - 1, j + 1) +
                     val(i - 1, j - 1)) /
                    (4.0 * dxi * deta);
      } else if (use_ghost) {
        r.u_xi = (ghost(j) - val(i - 1, j)) / (2.0 * dxi);
        r.u_xixi = (ghost(j) - 2.0 * val(i, j) + val(i - 1, j)) / (dxi * dxi);
        r.u_xieta = (ghost(j + 1) - ghost(j - 1) - val(i - 1, j + 1) + val(i - 1, j - 1)) /
                    (4.0 * dxi * deta);
      } else {
        r.u_xi = (3.0 * val(i, j) - 4.0 * val(i - 1, j) + val(i - 2, j)) / (2.0 * dxi);
        r.u_xixi = (2.0 * val(i, j) - 5.0 * val(i - 1, j) + 4.0 * val(i - 2, j) -
                    val(i - 3, j)) /
                   (dxi * dxi);
        const Real s_plus =
            (3.0 * val(i, j + 1) - 4.0 * val(i - 1, j + 1) + val(i - 2, j + 1)) /
            (2.0 * dxi);
        const Real s_minus =
            (3.0 * val(i, j - 1) - 4.0 * val(i - 1, j - 1) + val(i - 2, j - 1)) /
            (2.0 * dxi);
        r.u_xieta = (s_plus - s_minus) / (2.0 * deta);
      }
      push_physical(g, n, r, out);
    }
  }

  for (int n = 0; n < g.n_nodes; ++n) {
    const Eigen::Matrix<Real, 2, 1> p(out.grad(n, 0), out.grad(n, 1));
    out.v[n] = area_element(p);
  }
  return out;
}

DifferentialSample differentiate_1d(const GridFunction& uf, bool use_ghost) {
  const DomainGeometry& g = *uf.geom;
  const Vector& u = uf.values;
  const Real h = g.h;
  const int n = g.nx;
  DifferentialSample out;
  out.grad.setZero(n, 2);
  out.hess.setZero(n, 3);
  out.v.resize(n);

  for (int i = 1; i + 1 < n; ++i) {
    out.grad(i, 0) = (u[i + 1] - u[i - 1]) / (2.0 * h);
    out.hess(i, 0) = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
  }
  if (use_ghost) {
    out.grad(0, 0) = (u[1] - uf.ghost[0]) / (2.0 * h);
    out.hess(0, 0) = (u[1] - 2.0 * u[0] + uf.ghost[0]) / (h * h);
    out.grad(n - 1, 0) = (uf.ghost[1] - u[n - 2]) / (2.0 * h);
    out.hess(n - 1, 0) = (uf.ghost[1] - 2.0 * u[n - 1] + u[n - 2]) / (h * h);
  } else {
    out.grad(0, 0) = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    out.hess(0, 0) = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
    out.grad(n - 1, 0) = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    out.hess(n - 1, 0) =
        (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / (h * h);
  }
  for (int i = 0; i < n; ++i) out.v[i] = area_element_1d(out.grad(i, 0));
  return out;
}

}  // namespace

BcReport enforce_contact_bc(GridFunction& u, const ContactAngleField& theta) {
  const DomainGeometry& g = *u.geom;
  if (theta.geom.get() != &g)
    throw std::invalid_argument("enforce_contact_bc: geometry mismatch");
  u.ghost.resize(g.n_boundary());
  BcReport rep;
  rep.sweeps = 1;

  if (g.dim == 1) {
    // Closed form: the endpoint slope solving s*gamma + cos(theta)sqrt(1+s^2)=0
    // is -+cot(theta).
    const Real sl = -theta.cos_theta_b[0] / theta.sin_theta_b[0];
    const Real sr = theta.cos_theta_b[1] / theta.sin_theta_b[1];
    u.ghost[0] = u.values[1] - 2.0 * g.h * sl;
    u.ghost[1] = u.values[g.nx - 2] + 2.0 * g.h * sr;
    const Real res_l =
        std::abs(sl + theta.cos_theta_b[0] * area_element_1d(sl));
    const Real res_r =
        std::abs(-sr + theta.cos_theta_b[1] * area_element_1d(sr));
    rep.max_residual = std::max(res_l, res_r);
  } else {
    const int nb = g.n_xi - 1;
    auto val = [&](int i, int j) { return u.values[g.node_index(i, j)]; };
    for (int j = 0; j < g.n_eta; ++j) {
      const BoundaryNode& bn = g.boundary[j];
      const int n = bn.node;
      const Vec2 grad_xi(g.inv_jac(n, 0), g.inv_jac(n, 1));
      const Vec2 grad_eta(g.inv_jac(n, 2), g.inv_jac(n, 3));
      const Real u_eta = (val(nb, j + 1) - val(nb, j - 1)) / (2.0 * g.d_eta);

      // Split Du into the boundary-tangential part (known from the ring) and
      // the normal part fixed by the angle: Du.tau = u_eta/|x_eta|, and
      // q = Du.gamma must satisfy q + cos(theta)sqrt(1 + q^2 + t^2) = 0.
      // |x_eta| comes from inverting [grad_xi; grad_eta]: the eta column of the
      // Jacobian is perp(grad_xi)/det, so |x_eta| = |grad_xi|/|det|. (The grid
      // is not orthogonal away from a centred circle, so 1/|grad_eta| would be
      // wrong here.)
      const Real det =
          grad_xi.x() * grad_eta.y() - grad_xi.y() * grad_eta.x();
      const Real speed = grad_xi.norm() / std::abs(det);  // |x_eta|
      const Real tt = u_eta / speed;
      const Real q = -theta.cos_theta_b[j] * std::sqrt(1.0 + tt * tt) /
                     theta.sin_theta_b[j];
      const Vec2 T = u_eta * grad_eta;
      const Real s = (q - T.dot(bn.inner_normal)) / grad_xi.dot(bn.inner_normal);
      u.ghost[j] = val(nb - 1, j) + 2.0 * g.d_xi * s;

      const Vec2 du = s * grad_xi + T;
      const Real res = du.dot(bn.inner_normal) +
                       theta.cos_theta_b[j] * std::sqrt(1.0 + du.squaredNorm());
      rep.max_residual = std::max(rep.max_residual, std::abs(res));
    }
  }

  if (!u.ghost.allFinite()) throw solver_error("contact-angle closure produced non-finite ghosts");
  u.ghost_valid = true;
  return rep;
}

Vector contact_bc_residual_one_sided(const GridFunction& u,
                                     const ContactAngleField& theta) {
  const DifferentialSample s = differentiate_one_sided(u);
  const DomainGeometry& g = *u.geom;
  Vector res(g.n_boundary());
  for (int j = 0; j < g.n_boundary(); ++j) {
    const BoundaryNode& bn = g.boundary[j];
    const Vec2 du(s.grad(bn.node, 0), s.grad(bn.node, 1));
    res[j] = du.dot(bn.inner_normal) + theta.cos_theta_b[j] * s.v[bn.node];
  }
  return res;
}

DifferentialSample differentiate(const GridFunction& u) {
  if (!u.ghost_valid)
    throw solver_error("differentiate: ghost layer not closed (run enforce_contact_bc)");
  return u.geom->dim == 1 ? differentiate_1d(u, true) : differentiate_2d(u, true);
}

DifferentialSample differentiate_one_sided(const GridFunction& u) {
  return u.geom->dim == 1 ? differentiate_1d(u, false) : differentiate_2d(u, false);
}

Vector interior_operator(const DifferentialSample& s, Real A) {
  const int n = static_cast<int>(s.v.size());
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Matrix<Real, 2, 1> p(s.grad(i, 0), s.grad(i, 1));
    const Eigen::Matrix<Real, 3, 1> h(s.hess(i, 0), s.hess(i, 1), s.hess(i, 2));
    out[i] = coeff_contract(p, h) + A * s.v[i];
  }
  return out;
}

Vector interior_operator(const GridFunction& u, Real A) {
  return interior_operator(differentiate(u), A);
}

Vector mean_curvature_field(const GridFunction& u) {
  const DifferentialSample s = differentiate(u);
  const int n = static_cast<int>(s.v.size());
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Matrix<Real, 2, 1> p(s.grad(i, 0), s.grad(i, 1));
    const Eigen::Matrix<Real, 3, 1> h(s.hess(i, 0), s.hess(i, 1), s.hess(i, 2));
    out[i] = graph_mean_curvature(p, h);
  }
  return out;
}

}  // namespace cylflow
