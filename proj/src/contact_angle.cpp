#include "cylflow/contact_angle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cylflow {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

void require_inside(Real theta) {
  if (!(theta > 0.0) || !(theta < kPi)) {
    std::ostringstream msg;
    msg << "contact angle theta = " << theta << " must lie strictly inside (0, pi)";
    throw config_error(msg.str());
  }
}

}  // namespace

ThetaSpec offset_theta(const ThetaSpec& spec, Real offset) {
  if (std::holds_alternative<ConstantTheta>(spec))
    return ConstantTheta{std::get<ConstantTheta>(spec).value + offset};
  if (std::holds_alternative<EndpointTheta>(spec)) {
    auto e = std::get<EndpointTheta>(spec);
    return EndpointTheta{e.left + offset, e.right + offset};
  }
  auto s = std::get<BoundaryThetaSeries>(spec);
  s.series.constant += offset;
  return s;
}

ContactAngleField build_contact_angle(GeometryPtr geom, const ThetaSpec& spec) {
  ContactAngleField f;
  f.geom = geom;
  const DomainGeometry& g = *geom;
  f.theta.resize(g.n_nodes);
  f.theta_b.resize(g.n_boundary());

  if (g.dim == 1) {
    Real left, right;
    if (std::holds_alternative<ConstantTheta>(spec)) {
      left = right = std::get<ConstantTheta>(spec).value;
    } else if (std::holds_alternative<EndpointTheta>(spec)) {
      left = std::get<EndpointTheta>(spec).left;
      right = std::get<EndpointTheta>(spec).right;
    } else {
      throw config_error("interval domains take a constant or per-endpoint contact angle");
    }
    require_inside(left);
    require_inside(right);
    // Linear interior extension between the endpoint values.
    for (int i = 0; i < g.nx; ++i) {
      const Real lam = (g.coords(i, 0) - g.xa) / (g.xb - g.xa);
      f.theta[i] = (1.0 - lam) * left + lam * right;
    }
    f.theta_b.resize(2);
    f.theta_b << left, right;
    f.theta_min = std::min(left, right);
    f.theta_max = std::max(left, right);
    f.sup_theta_b = std::max(std::abs(left), std::abs(right));
    f.sup_dtheta_b = 0.0;
    f.sup_cos_b = std::max(std::abs(std::cos(left)), std::abs(std::cos(right)));
    f.sup_dcos_b = f.sup_d2cos_b = 0.0;
    f.sin_min_b = std::min(std::sin(left), std::sin(right));
  } else {
    TrigSeries series;
    if (std::holds_alternative<ConstantTheta>(spec)) {
      series.constant = std::get<ConstantTheta>(spec).value;
    } else if (std::holds_alternative<BoundaryThetaSeries>(spec)) {
      series = std::get<BoundaryThetaSeries>(spec).series;
    } else {
      throw config_error("star domains take a constant or series contact angle");
    }

    // Validate the range on a fine sampling, not just at the nodes.
    constexpr int kSamples = 8192;
    const Real step = 2.0 * kPi / kSamples;
    f.theta_min = f.theta_max = series.value(0.0);
    for (int k = 0; k < kSamples; ++k) {
      const Real th = series.value(k * step);
      f.theta_min = std::min(f.theta_min, th);
      f.theta_max = std::max(f.theta_max, th);
    }
    require_inside(f.theta_min);
    require_inside(f.theta_max);

    // Interior extension: constant along each grid ray; the pole carries the
    // series mean.
    f.theta[0] = series.constant;
    for (int j = 0; j < g.n_eta; ++j) {
      const Real th = series.value(j * g.d_eta);
      for (int i = 1; i < g.n_xi; ++i) f.theta[g.node_index(i, j)] = th;
      f.theta_b[j] = th;
    }

    // Boundary seminorms with respect to arc length, fine-sampled. The second
    // derivative of cos(theta) is differenced in the parameter and divided by
    // the metric factor.
    f.sup_theta_b = f.sup_dtheta_b = 0.0;
    f.sup_cos_b = f.sup_dcos_b = f.sup_d2cos_b = 0.0;
    f.sin_min_b = 1.0;
    auto speed = [&](Real phi) {
      const Real r = g.radius.value(phi), rp = g.radius.deriv(phi);
      return std::sqrt(r * r + rp * rp);  // |B'(phi)|
    };
    auto dcos_ds = [&](Real phi) {
      return -std::sin(series.value(phi)) * series.deriv(phi) / speed(phi);
    };
    for (int k = 0; k < kSamples; ++k) {
      const Real phi = k * step;
      const Real th = series.value(phi);
      const Real sp = speed(phi);
      f.sup_theta_b = std::max(f.sup_theta_b, std::abs(th));
      f.sup_dtheta_b = std::max(f.sup_dtheta_b, std::abs(series.deriv(phi) / sp));
      f.sup_cos_b = std::max(f.sup_cos_b, std::abs(std::cos(th)));
      f.sup_dcos_b = std::max(f.sup_dcos_b, std::abs(dcos_ds(phi)));
      const Real d2 = (dcos_ds(phi + step) - dcos_ds(phi - step)) / (2.0 * step * sp);
      f.sup_d2cos_b = std::max(f.sup_d2cos_b, std::abs(d2));
      f.sin_min_b = std::min(f.sin_min_b, std::sin(th));
    }
  }

  f.cos_theta = f.theta.array().cos();
  f.cos_theta_b = f.theta_b.array().cos();
  f.sin_theta_b = f.theta_b.array().sin();
  f.s0 = std::max(std::abs(std::cos(f.theta_min)), std::abs(std::cos(f.theta_max)));
  if (!(f.s0 < 1.0))
    throw config_error("contact angle too close to 0 or pi: |cos theta| must stay below 1");
  return f;
}

}  // namespace cylflow
