#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "cylflow/geometry.hpp"

using namespace cylflow;

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

StarSpec disk_spec(int n_xi, int n_eta, Real radius = 1.0) {
  StarSpec s;
  s.radius.constant = radius;
  s.n_xi = n_xi;
  s.n_eta = n_eta;
  return s;
}

StarSpec peanut_spec(int n_xi, int n_eta) {
  StarSpec s;
  s.radius.constant = 1.0;
  s.radius.cosine = {{2, 0.4}};
  s.n_xi = n_xi;
  s.n_eta = n_eta;
  return s;
}

}  // namespace

TEST_CASE("geometry: interval mesh and quadrature") {
  GeometryPtr geom = build_geometry(IntervalSpec{-1.0, 1.0, 201});
  const DomainGeometry& g = *geom;
  CHECK(g.dim == 1);
  CHECK(g.n_nodes == 201);
  CHECK(g.h == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.coords(0, 0) == -1.0);
  CHECK(g.coords(200, 0) == 1.0);
  CHECK(g.measure == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.boundary_length == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g.n_boundary() == 2);
  CHECK(g.boundary[0].inner_normal.x() == doctest::Approx(1.0));
  CHECK(g.boundary[1].inner_normal.x() == doctest::Approx(-1.0));
  CHECK(g.anchor_node() == 100);

  // Trapezoid rule on x^2: exact value 2/3, error h^2/3.
  Vector f(g.n_nodes);
  for (int i = 0; i < g.n_nodes; ++i) f[i] = g.coords(i, 0) * g.coords(i, 0);
  CHECK(quadrature(g, f) == doctest::Approx(2.0 / 3).epsilon(1e-4));

  GeometryPtr fine = build_geometry(refine_spec(IntervalSpec{-1.0, 1.0, 201}));
  CHECK(fine->nx == 401);
  Vector f2(fine->n_nodes);
  for (int i = 0; i < fine->n_nodes; ++i) f2[i] = fine->coords(i, 0) * fine->coords(i, 0);
  const Real e1 = std::abs(quadrature(g, f) - 2.0 / 3);
  const Real e2 = std::abs(quadrature(*fine, f2) - 2.0 / 3);
  CHECK(e1 / e2 > 3.5);  // second-order quadrature
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("geometry: interval distance field") {
  GeometryPtr geom = build_geometry(IntervalSpec{-1.0, 1.0, 201});
  const DomainGeometry& g = *geom;
  CHECK(g.dist[0] == doctest::Approx(0.0));
  CHECK(g.dist[200] == doctest::Approx(0.0));
  CHECK(g.dist[100] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(g.dist[50] == doctest::Approx(0.5).epsilon(1e-13));
  for (int i = 0; i < g.n_nodes; ++i)
    CHECK(std::abs(g.dist_grad(i, 0)) <= 1.0 + 1e-14);
  CHECK(g.dist_grad(10, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.dist_grad(190, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(g.collar_width == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.dist_hess_collar_sup == doctest::Approx(0.0));
}

TEST_CASE("geometry: disk measures are exact") {
  GeometryPtr geom = build_geometry(disk_spec(17, 16));
  const DomainGeometry& g = *geom;
  CHECK(g.dim == 2);
  CHECK(g.n_nodes == 1 + 16 * 16);
  // Azimuthal integrands are trigonometric polynomials far below the Nyquist
  // harmonic, so the periodic trapezoid rule integrates them exactly.
  CHECK(g.measure == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(g.boundary_length == doctest::Approx(2 * kPi).epsilon(1e-13));
  CHECK(g.centroid.norm() < 1e-14);
  CHECK(g.anchor_node() == 0);

  for (const BoundaryNode& b : g.boundary) {
    const Vec2 x(g.coords(b.node, 0), g.coords(b.node, 1));
    CHECK((b.inner_normal + x).norm() < 1e-12);  // points back to the centre
    CHECK(b.curvature == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.arc_weight == doctest::Approx(2 * kPi / 16).epsilon(1e-12));
  }
}

TEST_CASE("geometry: disk bulk quadrature converges at second order") {
  GeometryPtr coarse = build_geometry(disk_spec(17, 16));
  GeometryPtr fine = build_geometry(refine_spec(disk_spec(17, 16)));
  CHECK(fine->n_xi == 33);
  CHECK(fine->n_eta == 32);
  auto integral_r2 = [](const DomainGeometry& g) {
    Vector f(g.n_nodes);
    for (int i = 0; i < g.n_nodes; ++i)
      f[i] = g.coords(i, 0) * g.coords(i, 0) + g.coords(i, 1) * g.coords(i, 1);
    return quadrature(g, f);
  };
  const Real e1 = std::abs(integral_r2(*coarse) - kPi / 2);
  const Real e2 = std::abs(integral_r2(*fine) - kPi / 2);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("geometry: peanut curvature and area") {
  GeometryPtr geom = build_geometry(peanut_spec(17, 16));
  const DomainGeometry& g = *geom;
  // Area of r <= 1 + 0.4 cos(2 phi): pi (1 + 0.4^2/2) = 1.08 pi.
  CHECK(g.measure == doctest::Approx(1.08 * kPi).epsilon(1e-12));
  CHECK(g.centroid.norm() < 1e-13);

  // kappa = (rho^2 + 2 rho'^2 - rho rho'') / (rho^2 + rho'^2)^(3/2):
  // 4.2 / 1.4^3 at phi = 0 and -0.6 / 0.6^3 at phi = pi/2.
  const Vector kappa = boundary_curvature(g);
  CHECK(g.boundary[0].param == doctest::Approx(0.0));
  CHECK(kappa[0] == doctest::Approx(1.5306122448979593).epsilon(1e-12));
  CHECK(g.boundary[4].param == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(kappa[4] == doctest::Approx(-2.7777777777777777).epsilon(1e-12));
}

TEST_CASE("geometry: mildly elliptic domain stays convex") {
  StarSpec s;
  s.radius.constant = 1.0;
  s.radius.cosine = {{2, 0.2}};
  s.n_xi = 9;
  s.n_eta = 48;
  GeometryPtr geom = build_geometry(s);
  const Vector kappa = boundary_curvature(*geom);
  // The flattest point (phi = pi/2) has kappa = 0 exactly; nothing dips below.
  CHECK(kappa.minCoeff() > -1e-13);
  CHECK(kappa[0] == doctest::Approx(2.4 / std::pow(1.44, 1.5)).epsilon(1e-12));
}

TEST_CASE("geometry: distance against a brute-force polyline") {
  GeometryPtr geom = build_geometry(peanut_spec(9, 16));
  const DomainGeometry& g = *geom;
  TrigSeries rho = g.radius;

  const int samples = 40000;
  auto brute_distance = [&](const Vec2& x) {
    Real best = 1e300;
    for (int k = 0; k < samples; ++k) {
      const Real phi = 2 * kPi * k / samples;
      const Real r = rho.value(phi);
      const Vec2 p(r * std::cos(phi), r * std::sin(phi));
      best = std::min(best, (x - p).norm());
    }
    return best;
  };

  for (int node : {0, 17, 40, 75, 100}) {
    const Vec2 x(g.coords(node, 0), g.coords(node, 1));
    CHECK(std::abs(g.dist[node] - brute_distance(x)) < 1e-5);
  }
  for (const BoundaryNode& b : g.boundary) CHECK(std::abs(g.dist[b.node]) < 1e-12);
  for (int n = 0; n < g.n_nodes; ++n)
    CHECK(g.dist_grad.row(n).norm() <= 1.0 + 1e-14);
}

TEST_CASE("geometry: invalid specifications are rejected") {
  SUBCASE("radius dips below the floor") {
    StarSpec s;
    s.radius.constant = 1.0;
    s.radius.cosine = {{2, 1.2}};  // negative near phi = pi/2
    s.n_xi = 9;
    s.n_eta = 16;
    try {
      build_geometry(s);
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("radius") != std::string::npos);
    }
  }
  SUBCASE("odd azimuthal count") {
    StarSpec s = disk_spec(9, 15);
    CHECK_THROWS_AS(build_geometry(s), config_error);
  }
  SUBCASE("too few radial nodes") {
    StarSpec s = disk_spec(3, 16);
    CHECK_THROWS_AS(build_geometry(s), config_error);
  }
  SUBCASE("interval with too few nodes") {
    CHECK_THROWS_AS(build_geometry(IntervalSpec{0.0, 1.0, 3}), config_error);
  }
  SUBCASE("degenerate interval") {
    CHECK_THROWS_AS(build_geometry(IntervalSpec{1.0, 1.0, 11}), config_error);
  }
}

TEST_CASE("geometry: node indexing round-trips") {
  GeometryPtr geom = build_geometry(disk_spec(5, 8));
  const DomainGeometry& g = *geom;
  CHECK(g.node_index(0, 3) == 0);         // every column meets the pole
  CHECK(g.node_index(1, 0) == 1);
  CHECK(g.node_index(1, 8) == 1);         // azimuthal wrap
  CHECK(g.node_index(2, -1) == g.node_index(2, 7));
  CHECK(g.is_boundary(g.node_index(4, 5)));
  CHECK(!g.is_boundary(g.node_index(3, 5)));
  CHECK(g.n_boundary() == 8);
}
