#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "cylflow/series.hpp"
#include "cylflow/types.hpp"

namespace cylflow {

// Interval domain [a, b] with `nodes` grid points (spacing (b-a)/(nodes-1)).
struct IntervalSpec {
  Real a = -1.0;
  Real b = 1.0;
  int nodes = 101;
};

// Star-shaped planar domain bounded by the polar curve r = radius(phi),
// meshed with a boundary-fitted grid: rays from the centroid to the boundary,
// n_xi nodes per ray (the innermost collapsing to a single shared pole node)
// and n_eta rays (n_eta even so that rays come in antipodal pairs).
struct StarSpec {
  TrigSeries radius;
  int n_xi = 17;
  int n_eta = 16;
  // Build fails if the sampled min of radius() is <= max(0, rho_floor).
  Real rho_floor = 0.0;
};

using DomainSpec = std::variant<IntervalSpec, StarSpec>;

// Halve the mesh width in every direction (used by refinement studies).
DomainSpec refine_spec(const DomainSpec& spec);

struct BoundaryNode {
  int node = -1;        // flat node index
  Vec2 inner_normal;    // unit, points into the domain
  Real curvature = 0;   // of the boundary curve; positive where locally convex
  Real arc_weight = 0;  // weight for boundary line integrals
  Real param = 0;       // boundary parameter: polar angle (2d), -1/+1 endpoint (1d)
};

// Discrete domain: node coordinates, quadrature weights, boundary data,
// curvilinear metric for derivative stencils, and the distance-to-boundary
// field with its discrete gradient.
//
// 2d node layout: node 0 is the pole (grid centre); node 1 + (i-1)*n_eta + j
// is ring i (1 <= i <= n_xi-1), column j (0 <= j < n_eta). Ring n_xi-1 is the
// boundary. 1d: nodes 0..nx-1 left to right, endpoints are the boundary.
struct DomainGeometry {
  int dim = 1;
  int n_nodes = 0;

  // 1d quantities
  Real xa = 0, xb = 0, h = 0;
  int nx = 0;

  // 2d quantities
  int n_xi = 0, n_eta = 0;
  Real d_xi = 0, d_eta = 0;
  Vec2 centroid = Vec2::Zero();
  TrigSeries radius;

  Eigen::Matrix<Real, Eigen::Dynamic, 2> coords;  // node positions (y = 0 in 1d)
  Vector area_weight;                             // bulk quadrature weights
  Real measure = 0;                               // sum of area weights
  Real boundary_length = 0;                       // sum of arc weights
  std::vector<BoundaryNode> boundary;

  // Inverse Jacobian of the reference map, per node: [xi_x, xi_y, eta_x, eta_y].
  // Row 0 (the pole) is unused; the pole gets its own least-squares operators.
  Eigen::Matrix<Real, Eigen::Dynamic, 4> inv_jac;
  // Second-derivative chain-rule corrections per node:
  // [Gxi_xx, Gxi_xy, Gxi_yy, Geta_xx, Geta_xy, Geta_yy], where
  // D_ab u = xi_a xi_b u_xixi + ... + Gxi_ab u_xi + Geta_ab u_eta.
  Eigen::Matrix<Real, Eigen::Dynamic, 6> chain2;

  // Pole derivative reconstruction: least-squares quadratic through the pole
  // and its first two rings (this couples antipodal columns across the pole).
  // Applied to the vector of (ring value - pole value); rows give
  // (gx, gy, hxx, hxy, hyy).
  Eigen::MatrixXd pole_fit;
  std::vector<int> pole_fit_nodes;

  // Distance to the boundary and its discrete gradient. The gradient is
  // rescaled by a global factor <= 1 so that max |grad d| <= 1 exactly: the
  // analytic field has |Dd| = 1 a.e., the raw discrete one can overshoot by
  // O(h^2), and downstream two-sided bounds need the sharp constant.
  Vector dist;
  Eigen::Matrix<Real, Eigen::Dynamic, 2> dist_grad;
  Real dist_grad_scale = 1.0;       // applied factor, for the curious
  Real dist_hess_collar_sup = 0.0;  // sup of |D^2 d| (spectral) over the collar
  Real collar_width = 0.0;          // collar: 0 < d < collar_width

  Real min_node_spacing = 0;    // smallest edge length (CFL mesh width)
  Real min_radial_spacing = 0;  // smallest edge along rays (implicit dt scale)

  int node_index(int i, int j) const {
    if (dim == 1) return i;
    if (i == 0) return 0;
    j %= n_eta;
    if (j < 0) j += n_eta;
    return 1 + (i - 1) * n_eta + j;
  }
  bool is_boundary(int node) const {
    if (dim == 1) return node == 0 || node == nx - 1;
    return node >= 1 + (n_xi - 2) * n_eta;
  }
  int n_boundary() const { return static_cast<int>(boundary.size()); }
  // Node closest to the centroid; reference point for anchoring profiles.
  int anchor_node() const { return dim == 1 ? (nx - 1) / 2 : 0; }
};

using GeometryPtr = std::shared_ptr<const DomainGeometry>;

GeometryPtr build_geometry(const DomainSpec& spec);

// Bulk integral of a node field against the area weights.
Real quadrature(const DomainGeometry& geom, const Vector& f);
// Boundary line integral; g has one entry per boundary node (in boundary order).
Real boundary_quadrature(const DomainGeometry& geom, const Vector& g);
// Restrict a full node field to the boundary nodes (in boundary order).
Vector boundary_restrict(const DomainGeometry& geom, const Vector& f);
// Curvature of the boundary per boundary node.
Vector boundary_curvature(const DomainGeometry& geom);

}  // namespace cylflow
