#pragma once

#include <utility>

#include "cylflow/geometry.hpp"
#include "cylflow/types.hpp"

namespace cylflow {

// A scalar field sampled at the grid nodes, plus (once the contact-angle
// closure has run) one ghost value per boundary node so that centred stencils
// can reach across the boundary.
struct GridFunction {
  GeometryPtr geom;
  Vector values;
  Vector ghost;             // one entry per boundary node, boundary order
  bool ghost_valid = false;

  GridFunction() = default;
  GridFunction(GeometryPtr g, Vector v) : geom(std::move(g)), values(std::move(v)) {
    if (!geom || values.size() != geom->n_nodes)
      throw std::invalid_argument("GridFunction: value count must match node count");
  }
  static GridFunction constant(GeometryPtr g, Real value) {
    Vector v = Vector::Constant(g->n_nodes, value);
    return GridFunction(std::move(g), std::move(v));
  }
  int size() const { return static_cast<int>(values.size()); }
};

// First and second derivatives plus the area element, one row per node.
struct DifferentialSample {
  Eigen::Matrix<Real, Eigen::Dynamic, 2> grad;
  Eigen::Matrix<Real, Eigen::Dynamic, 3> hess;  // columns: xx, xy, yy
  Vector v;                                     // sqrt(1 + |grad|^2)
};

}  // namespace cylflow
