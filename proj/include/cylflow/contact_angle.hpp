#pragma once

#include <variant>

#include "cylflow/fields.hpp"
#include "cylflow/geometry.hpp"

namespace cylflow {

// Prescribed contact angle: Du . gamma = -cos(theta) * v on the boundary.
// theta must lie strictly inside (0, pi).
struct ConstantTheta {
  Real value;
};
struct BoundaryThetaSeries {  // 2d: theta as a function of the polar angle
  TrigSeries series;
};
struct EndpointTheta {  // 1d: one angle per endpoint
  Real left, right;
};
using ThetaSpec = std::variant<ConstantTheta, BoundaryThetaSeries, EndpointTheta>;

struct ContactAngleField {
  GeometryPtr geom;
  Vector theta;      // nodal values: boundary data extended inward
  Vector cos_theta;  // cos(theta) at every node

  Vector theta_b, cos_theta_b, sin_theta_b;  // per boundary node

  Real theta_min = 0, theta_max = 0;  // over nodes and a fine boundary sampling
  Real s0 = 0;                        // sup |cos theta|; < 1 by validation
  Real sin_min_b = 0;                 // inf sin(theta) on the boundary

  // Boundary-restricted seminorms (value + tangential arc-length derivatives,
  // fine-sampled). The interior extension is constant along grid rays and so
  // has no meaningful gradient of its own; reports that quote these state the
  // convention. For an interval the boundary is two points: derivative terms
  // are zero there.
  Real sup_theta_b = 0, sup_dtheta_b = 0;
  Real sup_cos_b = 0, sup_dcos_b = 0, sup_d2cos_b = 0;

  Real theta_c1_boundary() const { return sup_theta_b + sup_dtheta_b; }
  Real cos_c2_boundary() const { return sup_cos_b + sup_dcos_b + sup_d2cos_b; }
};

ContactAngleField build_contact_angle(GeometryPtr geom, const ThetaSpec& spec);

// Shift every angle by a constant (parameter sweeps); revalidates the range.
ThetaSpec offset_theta(const ThetaSpec& spec, Real offset);

}  // namespace cylflow
