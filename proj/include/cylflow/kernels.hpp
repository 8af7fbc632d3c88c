#pragma once

#include <Eigen/Core>
#include <cmath>

// Pointwise algebra of the graphical flow, templated on scalar and dimension
// so the kernels stay expression-friendly and unit-testable in isolation.
// With p = Du, the quasilinear operator is coeff_matrix(p) : D^2 u, and the
// area element is area_element(p) = sqrt(1 + |p|^2).

namespace cylflow {

template <typename Scalar>
Scalar area_element_sq(const Eigen::Matrix<Scalar, 2, 1>& p) {
  return Scalar(1) + p.squaredNorm();
}

template <typename Scalar>
Scalar area_element(const Eigen::Matrix<Scalar, 2, 1>& p) {
  using std::sqrt;
  return sqrt(area_element_sq(p));
}

// coeff_matrix(p) = I - p p^T / (1 + |p|^2). Symmetric positive definite with
// eigenvalues 1 (tangential to p) and 1/(1+|p|^2) (along p); degenerates only
// as |p| -> infinity.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> coeff_matrix(const Eigen::Matrix<Scalar, 2, 1>& p) {
  const Scalar vsq = area_element_sq(p);
  return Eigen::Matrix<Scalar, 2, 2>::Identity() - (p * p.transpose()) / vsq;
}

// coeff_matrix(p) : H for symmetric H stored as (h_xx, h_xy, h_yy).
template <typename Scalar>
Scalar coeff_contract(const Eigen::Matrix<Scalar, 2, 1>& p,
                      const Eigen::Matrix<Scalar, 3, 1>& h) {
  const Scalar vsq = area_element_sq(p);
  const Scalar axx = Scalar(1) - p.x() * p.x() / vsq;
  const Scalar ayy = Scalar(1) - p.y() * p.y() / vsq;
  const Scalar axy = -p.x() * p.y() / vsq;
  return axx * h[0] + Scalar(2) * axy * h[1] + ayy * h[2];
}

// Mean curvature of the graph with upward normal, in the expanded divergence
// form H = (tr H)/v - p^T H p / v^3. Satisfies v * H = coeff_contract(p, h).
template <typename Scalar>
Scalar graph_mean_curvature(const Eigen::Matrix<Scalar, 2, 1>& p,
                            const Eigen::Matrix<Scalar, 3, 1>& h) {
  const Scalar v = area_element(p);
  const Scalar trace = h[0] + h[2];
  const Scalar php =
      p.x() * p.x() * h[0] + Scalar(2) * p.x() * p.y() * h[1] + p.y() * p.y() * h[2];
  return trace / v - php / (v * v * v);
}

// One-dimensional reductions (p and h scalar).
template <typename Scalar>
Scalar area_element_1d(Scalar p) {
  using std::sqrt;
  return sqrt(Scalar(1) + p * p);
}

template <typename Scalar>
Scalar coeff_contract_1d(Scalar p, Scalar h) {
  return h / (Scalar(1) + p * p);
}

}  // namespace cylflow
