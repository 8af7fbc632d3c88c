#include "cylflow/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cylflow {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;
constexpr int kFineSamples = 8192;  // boundary sampling for checks / centroid

Vec2 polar_point(const TrigSeries& rho, Real phi) {
  const Real r = rho.value(phi);
  return {r * std::cos(phi), r * std::sin(phi)};
}

Vec2 polar_tangent(const TrigSeries& rho, Real phi) {
  const Real r = rho.value(phi), rp = rho.deriv(phi);
  const Real c = std::cos(phi), s = std::sin(phi);
  return {rp * c - r * s, rp * s + r * c};
}

Vec2 polar_second(const TrigSeries& rho, Real phi) {
  const Real r = rho.value(phi), rp = rho.deriv(phi), rpp = rho.deriv2(phi);
  const Real c = std::cos(phi), s = std::sin(phi);
  return {(rpp - r) * c - 2.0 * rp * s, (rpp - r) * s + 2.0 * rp * c};
}

Real cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Real polar_curvature(const TrigSeries& rho, Real phi) {
  const Real r = rho.value(phi), rp = rho.deriv(phi), rpp = rho.deriv2(phi);
  const Real den = std::pow(r * r + rp * rp, 1.5);
  return (r * r + 2.0 * rp * rp - r * rpp) / den;
}

// Distance from x to the boundary curve: coarse scan plus golden-section
// refinement of |x - B(phi)|^2 around the best sample.
Real distance_to_curve(const TrigSeries& rho, const Vec2& x) {
  constexpr int kScan = 1024;
  const Real step = 2.0 * kPi / kScan;
  Real best = 0.0, best_val = std::numeric_limits<Real>::max();
  for (int k = 0; k < kScan; ++k) {
    const Real phi = k * step;
    const Real val = (x - polar_point(rho, phi)).squaredNorm();
    if (val < best_val) {
      best_val = val;
      best = phi;
    }
  }
  Real lo = best - step, hi = best + step;
  const Real gr = (std::sqrt(5.0) - 1.0) / 2.0;
  Real a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  Real fa = (x - polar_point(rho, a)).squaredNorm();
  Real fb = (x - polar_point(rho, b)).squaredNorm();
  for (int it = 0; it < 90; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = (x - polar_point(rho, a)).squaredNorm();
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = (x - polar_point(rho, b)).squaredNorm();
    }
  }
  return std::sqrt(std::min(fa, fb));
}

void build_interval(const IntervalSpec& spec, DomainGeometry& g) {
  if (!(spec.b > spec.a)) throw config_error("interval: need b > a");
  if (spec.nodes < 5) throw config_error("interval: need at least 5 nodes");

  g.dim = 1;
  g.nx = spec.nodes;
  g.n_nodes = spec.nodes;
  g.xa = spec.a;
  g.xb = spec.b;
  g.h = (spec.b - spec.a) / (spec.nodes - 1);

  g.coords.resize(g.n_nodes, 2);
  g.area_weight.resize(g.n_nodes);
  for (int i = 0; i < g.nx; ++i) {
    g.coords(i, 0) = spec.a + i * g.h;
    g.coords(i, 1) = 0.0;
    g.area_weight[i] = (i == 0 || i == g.nx - 1) ? 0.5 * g.h : g.h;
  }
  g.measure = g.area_weight.sum();

  BoundaryNode left, right;
  left.node = 0;
  left.inner_normal = Vec2(1.0, 0.0);
  left.arc_weight = 1.0;
  left.param = -1.0;
  right.node = g.nx - 1;
  right.inner_normal = Vec2(-1.0, 0.0);
  right.arc_weight = 1.0;
  right.param = 1.0;
  g.boundary = {left, right};
  g.boundary_length = 2.0;

  // Distance to the boundary and its discrete gradient (exact for the tent).
  g.dist.resize(g.n_nodes);
  g.dist_grad.setZero(g.n_nodes, 2);
  for (int i = 0; i < g.nx; ++i) {
    const Real x = g.coords(i, 0);
    g.dist[i] = std::min(x - spec.a, spec.b - x);
  }
  for (int i = 0; i < g.nx; ++i) {
    if (i == 0)
      g.dist_grad(i, 0) = (-3.0 * g.dist[0] + 4.0 * g.dist[1] - g.dist[2]) / (2.0 * g.h);
    else if (i == g.nx - 1)
      g.dist_grad(i, 0) =
          (3.0 * g.dist[i] - 4.0 * g.dist[i - 1] + g.dist[i - 2]) / (2.0 * g.h);
    else
      g.dist_grad(i, 0) = (g.dist[i + 1] - g.dist[i - 1]) / (2.0 * g.h);
  }
  const Real gmax = g.dist_grad.col(0).cwiseAbs().maxCoeff();
  if (gmax > 1.0) {
    g.dist_grad /= gmax;
    g.dist_grad_scale = 1.0 / gmax;
  }
  g.collar_width = (spec.b - spec.a) / 8.0;
  Real hsup = 0.0;
  for (int i = 1; i + 1 < g.nx; ++i) {
    if (g.dist[i] <= 0.0 || g.dist[i] >= g.collar_width) continue;
    hsup = std::max(hsup,
                    std::abs(g.dist[i + 1] - 2.0 * g.dist[i] + g.dist[i - 1]) / (g.h * g.h));
  }
  g.dist_hess_collar_sup = hsup;

  g.min_node_spacing = g.h;
  g.min_radial_spacing = g.h;
}

void build_star(const StarSpec& spec, DomainGeometry& g) {
  if (spec.n_xi < 4) throw config_error("star domain: need n_xi >= 4");
  if (spec.n_eta < 8 || spec.n_eta % 2 != 0)
    throw config_error("star domain: need even n_eta >= 8");

  const TrigSeries& rho = spec.radius;
  g.dim = 2;
  g.n_xi = spec.n_xi;
  g.n_eta = spec.n_eta;
  g.radius = rho;
  g.d_xi = 1.0 / (spec.n_xi - 1);
  g.d_eta = 2.0 * kPi / spec.n_eta;
  g.n_nodes = 1 + (spec.n_xi - 1) * spec.n_eta;

  // Radius positivity on a fine sampling.
  {
    const Real floor = std::max<Real>(0.0, spec.rho_floor);
    const Real step = 2.0 * kPi / kFineSamples;
    for (int k = 0; k < kFineSamples; ++k) {
      const Real phi = k * step;
      if (rho.value(phi) <= floor) {
        std::ostringstream msg;
        msg << "star domain: radius " << rho.value(phi) << " at angle " << phi
            << " is not above the floor " << floor;
        throw config_error(msg.str());
      }
    }
  }

  // Area and centroid of the region bounded by the polar curve, by periodic
  // trapezoid sums (spectrally accurate for a trigonometric radius).
  Real area = 0.0;
  Vec2 moment = Vec2::Zero();
  {
    const Real step = 2.0 * kPi / kFineSamples;
    for (int k = 0; k < kFineSamples; ++k) {
      const Real phi = k * step;
      const Real r = rho.value(phi);
      area += 0.5 * r * r * step;
      moment += (r * r * r / 3.0) * Vec2(std::cos(phi), std::sin(phi)) * step;
    }
  }
  g.centroid = moment / area;

  // Star-shapedness about the centroid: rays from the centroid must cross the
  // boundary transversally, i.e. cross(B - C, B') > 0 everywhere.
  {
    const Real step = 2.0 * kPi / kFineSamples;
    for (int k = 0; k < kFineSamples; ++k) {
      const Real phi = k * step;
      const Real c = cross2(polar_point(rho, phi) - g.centroid, polar_tangent(rho, phi));
      if (c <= 0.0) {
        std::ostringstream msg;
        msg << "star domain: not star-shaped about its centroid (ray test fails at angle "
            << phi << ")";
        throw config_error(msg.str());
      }
    }
  }

  g.coords.resize(g.n_nodes, 2);
  g.area_weight.setZero(g.n_nodes);
  g.inv_jac.setZero(g.n_nodes, 4);
  g.chain2.setZero(g.n_nodes, 6);

  g.coords(0, 0) = g.centroid.x();
  g.coords(0, 1) = g.centroid.y();

  std::vector<Vec2> ray(g.n_eta), btan(g.n_eta), bsec(g.n_eta);
  std::vector<Real> ray_cross(g.n_eta);
  for (int j = 0; j < g.n_eta; ++j) {
    const Real eta = j * g.d_eta;
    ray[j] = polar_point(rho, eta) - g.centroid;  // x_xi along the whole ray
    btan[j] = polar_tangent(rho, eta);
    bsec[j] = polar_second(rho, eta);
    ray_cross[j] = cross2(ray[j], btan[j]);
  }

  for (int i = 1; i < g.n_xi; ++i) {
    const Real xi = i * g.d_xi;
    for (int j = 0; j < g.n_eta; ++j) {
      const int n = g.node_index(i, j);
      const Vec2 pos = g.centroid + xi * ray[j];
      g.coords(n, 0) = pos.x();
      g.coords(n, 1) = pos.y();

      const Vec2 x_xi = ray[j];
      const Vec2 x_eta = xi * btan[j];
      const Real det = xi * ray_cross[j];
      const Vec2 grad_xi(x_eta.y() / det, -x_eta.x() / det);
      const Vec2 grad_eta(-x_xi.y() / det, x_xi.x() / det);
      g.inv_jac(n, 0) = grad_xi.x();
      g.inv_jac(n, 1) = grad_xi.y();
      g.inv_jac(n, 2) = grad_eta.x();
      g.inv_jac(n, 3) = grad_eta.y();

      // Second-derivative corrections: with x_xixi = 0, x_xieta = B',
      // x_etaeta = xi B'', let M_ab = B' (xi_a eta_b + eta_a xi_b)
      //                             + xi B'' eta_a eta_b  (vector in R^2);
      // then Gmu_ab = -grad(mu) . M_ab.
      const Vec2 x_xieta = btan[j];
      const Vec2 x_etaeta = xi * bsec[j];
      const Real gx[2] = {grad_xi.x(), grad_xi.y()};
      const Real ge[2] = {grad_eta.x(), grad_eta.y()};
      int col = 0;
      for (const auto& [a, b] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
        const Vec2 m = x_xieta * (gx[a] * ge[b] + ge[a] * gx[b]) + x_etaeta * (ge[a] * ge[b]);
        g.chain2(n, col) = -grad_xi.dot(m);       // Gxi_ab
        g.chain2(n, 3 + col) = -grad_eta.dot(m);  // Geta_ab
        ++col;
      }

      // Trapezoid-in-xi, periodic-trapezoid-in-eta quadrature weight.
      const Real w_xi = (i == g.n_xi - 1) ? 0.5 * g.d_xi : g.d_xi;
      g.area_weight[n] = det * w_xi * g.d_eta;
    }
  }
  g.measure = g.area_weight.sum();

  g.boundary.resize(g.n_eta);
  for (int j = 0; j < g.n_eta; ++j) {
    BoundaryNode bn;
    bn.node = g.node_index(g.n_xi - 1, j);
    const Vec2 t = btan[j];
    bn.inner_normal = Vec2(-t.y(), t.x()) / t.norm();
    bn.curvature = polar_curvature(rho, j * g.d_eta);
    bn.arc_weight = t.norm() * g.d_eta;
    bn.param = j * g.d_eta;
    g.boundary[j] = bn;
  }
  g.boundary_length = 0.0;
  for (const auto& bn : g.boundary) g.boundary_length += bn.arc_weight;

  // Least-squares quadratic at the pole through rings 1 and 2.
  {
    const int m = 2 * g.n_eta;
    Eigen::MatrixXd basis(m, 5);
    g.pole_fit_nodes.clear();
    g.pole_fit_nodes.reserve(m);
    int row = 0;
    for (int i = 1; i <= 2; ++i) {
      for (int j = 0; j < g.n_eta; ++j) {
        const int n = g.node_index(i, j);
        g.pole_fit_nodes.push_back(n);
        const Real dx = g.coords(n, 0) - g.centroid.x();
        const Real dy = g.coords(n, 1) - g.centroid.y();
        basis(row, 0) = dx;
        basis(row, 1) = dy;
        basis(row, 2) = 0.5 * dx * dx;
        basis(row, 3) = dx * dy;
        basis(row, 4) = 0.5 * dy * dy;
        ++row;
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
    g.pole_fit = qr.solve(Eigen::MatrixXd::Identity(m, m));
  }

  // Distance field: exact zero on the boundary ring, minimized over the curve
  // elsewhere.
  g.dist.setZero(g.n_nodes);
  for (int n = 0; n < g.n_nodes; ++n) {
    if (g.is_boundary(n)) continue;
    g.dist[n] = distance_to_curve(rho, Vec2(g.coords(n, 0), g.coords(n, 1)));
  }

  // Discrete gradient of the distance field: central stencils inside, one-sided
  // second-order at the boundary ring, least-squares at the pole.
  g.dist_grad.setZero(g.n_nodes, 2);
  auto val = [&](int i, int j) { return g.dist[g.node_index(i, j)]; };
  for (int i = 1; i < g.n_xi; ++i) {
    for (int j = 0; j < g.n_eta; ++j) {
      const int n = g.node_index(i, j);
      Real u_xi;
      if (i == g.n_xi - 1)
        u_xi = (3.0 * val(i, j) - 4.0 * val(i - 1, j) + val(i - 2, j)) / (2.0 * g.d_xi);
      else
        u_xi = (val(i + 1, j) - val(i - 1, j)) / (2.0 * g.d_xi);
      const Real u_eta = (val(i, j + 1) - val(i, j - 1)) / (2.0 * g.d_eta);
      g.dist_grad(n, 0) = g.inv_jac(n, 0) * u_xi + g.inv_jac(n, 2) * u_eta;
      g.dist_grad(n, 1) = g.inv_jac(n, 1) * u_xi + g.inv_jac(n, 3) * u_eta;
    }
  }
  {
    Eigen::VectorXd delta(2 * g.n_eta);
    for (int k = 0; k < 2 * g.n_eta; ++k) delta[k] = g.dist[g.pole_fit_nodes[k]] - g.dist[0];
    const Eigen::VectorXd fit = g.pole_fit * delta;
    g.dist_grad(0, 0) = fit[0];
    g.dist_grad(0, 1) = fit[1];
  }
  const Real gmax = g.dist_grad.rowwise().norm().maxCoeff();
  if (gmax > 1.0) {
    g.dist_grad /= gmax;
    g.dist_grad_scale = 1.0 / gmax;
  }

  // Collar sup of |D^2 d| (spectral norm): interior collar nodes by the full
  // chain rule, boundary nodes contribute |curvature|.
  g.collar_width = 0.0;
  {
    Real rho_min = rho.value(0.0);
    const Real step = 2.0 * kPi / kFineSamples;
    for (int k = 1; k < kFineSamples; ++k) rho_min = std::min(rho_min, rho.value(k * step));
    g.collar_width = rho_min / 4.0;
  }
  Real hsup = 0.0;
  for (const auto& bn : g.boundary) hsup = std::max(hsup, std::abs(bn.curvature));
  for (int i = 1; i + 1 < g.n_xi; ++i) {
    for (int j = 0; j < g.n_eta; ++j) {
      const int n = g.node_index(i, j);
      if (g.dist[n] <= 0.0 || g.dist[n] >= g.collar_width) continue;
      const Real u_xi = (val(i + 1, j) - val(i - 1, j)) / (2.0 * g.d_xi);
      const Real u_eta = (val(i, j + 1) - val(i, j - 1)) / (2.0 * g.d_eta);
      const Real u_xixi =
          (val(i + 1, j) - 2.0 * val(i, j) + val(i - 1, j)) / (g.d_xi * g.d_xi);
      const Real u_etaeta =
          (val(i, j + 1) - 2.0 * val(i, j) + val(i, j - 1)) / (g.d_eta * g.d_eta);
      const Real u_xieta = (val(i + 1, j + 1) - val(i + 1, j - 1) - val(i - 1, j + 1) +
                            val(i - 1, j - 1)) /
                           (4.0 * g.d_xi * g.d_eta);
      const Real xx = g.inv_jac(n, 0), xy = g.inv_jac(n, 1);
      const Real ex = g.inv_jac(n, 2), ey = g.inv_jac(n, 3);
      const Real hxx = xx * xx * u_xixi + 2.0 * xx * ex * u_xieta + ex * ex * u_etaeta +
                       g.chain2(n, 0) * u_xi + g.chain2(n, 3) * u_eta;
      const Real hxy = xx * xy * u_xixi + (xx * ey + xy * ex) * u_xieta +
                       ex * ey * u_etaeta + g.chain2(n, 1) * u_xi + g.chain2(n, 4) * u_eta;
      const Real hyy = xy * xy * u_xixi + 2.0 * xy * ey * u_xieta + ey * ey * u_etaeta +
                       g.chain2(n, 2) * u_xi + g.chain2(n, 5) * u_eta;
      const Real mean = 0.5 * (hxx + hyy);
      const Real disc = std::sqrt(0.25 * (hxx - hyy) * (hxx - hyy) + hxy * hxy);
      hsup = std::max(hsup, std::abs(mean) + disc);
    }
  }
  g.dist_hess_collar_sup = hsup;

  // Mesh widths: radial edges have length d_xi*|ray|, azimuthal edges shrink
  // toward the pole.
  Real rad_min = std::numeric_limits<Real>::max();
  for (int j = 0; j < g.n_eta; ++j) rad_min = std::min(rad_min, g.d_xi * ray[j].norm());
  Real edge_min = rad_min;
  for (int i = 1; i < g.n_xi; ++i) {
    for (int j = 0; j < g.n_eta; ++j) {
      const int n = g.node_index(i, j);
      const int m = g.node_index(i, j + 1);
      const Real len = (g.coords.row(n) - g.coords.row(m)).norm();
      edge_min = std::min(edge_min, len);
    }
  }
  g.min_radial_spacing = rad_min;
  g.min_node_spacing = edge_min;
}

}  // namespace

DomainSpec refine_spec(const DomainSpec& spec) {
  if (std::holds_alternative<IntervalSpec>(spec)) {
    IntervalSpec s = std::get<IntervalSpec>(spec);
    s.nodes = 2 * (s.nodes - 1) + 1;
    return s;
  }
  StarSpec s = std::get<StarSpec>(spec);
  s.n_xi = 2 * (s.n_xi - 1) + 1;
  s.n_eta = 2 * s.n_eta;
  return s;
}

GeometryPtr build_geometry(const DomainSpec& spec) {
  auto g = std::make_shared<DomainGeometry>();
  if (std::holds_alternative<IntervalSpec>(spec))
    build_interval(std::get<IntervalSpec>(spec), *g);
  else
    build_star(std::get<StarSpec>(spec), *g);
  return g;
}

Real quadrature(const DomainGeometry& geom, const Vector& f) {
  if (f.size() != geom.n_nodes) throw std::invalid_argument("quadrature: size mismatch");
  return geom.area_weight.dot(f);
}

Real boundary_quadrature(const DomainGeometry& geom, const Vector& g) {
  if (g.size() != geom.n_boundary())
    throw std::invalid_argument("boundary_quadrature: size mismatch");
  Real acc = 0.0;
  for (int j = 0; j < geom.n_boundary(); ++j) acc += geom.boundary[j].arc_weight * g[j];
  return acc;
}

Vector boundary_restrict(const DomainGeometry& geom, const Vector& f) {
  if (f.size() != geom.n_nodes)
    throw std::invalid_argument("boundary_restrict: size mismatch");
  Vector out(geom.n_boundary());
  for (int j = 0; j < geom.n_boundary(); ++j) out[j] = f[geom.boundary[j].node];
  return out;
}

Vector boundary_curvature(const DomainGeometry& geom) {
  Vector out(geom.n_boundary());
  for (int j = 0; j < geom.n_boundary(); ++j) out[j] = geom.boundary[j].curvature;
  return out;
}

}  // namespace cylflow
