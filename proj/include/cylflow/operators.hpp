#pragma once

#include "cylflow/contact_angle.hpp"
#include "cylflow/fields.hpp"

namespace cylflow {

struct BcReport {
  Real max_residual = 0;  // worst |Du . gamma + cos(theta) v| after closure
  int sweeps = 0;
};

// Fill u.ghost so that the centred boundary stencils satisfy the contact-angle
// condition exactly. On this mesh family the radial metric direction is exactly
// normal at the boundary, so the scalar closure per boundary node solves in
// closed form (the tangential slope is read from the boundary ring alone);
// the residual is then verified and must sit at rounding level.
BcReport enforce_contact_bc(GridFunction& u, const ContactAngleField& theta);

// BC residual per boundary node from one-sided derivatives (no ghosts) —
// used to flag incompatible initial data before the first closure.
Vector contact_bc_residual_one_sided(const GridFunction& u,
                                     const ContactAngleField& theta);

// Gradient / Hessian / area element at every node. Boundary stencils reach
// into the ghost layer: enforce_contact_bc must have run on u.
DifferentialSample differentiate(const GridFunction& u);

// Same, but one-sided second-order stencils at the boundary; for fields that
// carry no boundary condition (distance, angles, diagnostics).
DifferentialSample differentiate_one_sided(const GridFunction& u);

// The right-hand side a^ij(Du) D_ij u + A v at every node.
Vector interior_operator(const DifferentialSample& s, Real A);
Vector interior_operator(const GridFunction& u, Real A);  // differentiates first

// Mean curvature of the graph, expanded divergence form (v H = a^ij D_ij u).
Vector mean_curvature_field(const GridFunction& u);

}  // namespace cylflow
