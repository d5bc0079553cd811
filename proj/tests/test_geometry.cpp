#include <cmath>
#include <stdexcept>

#include "chargelab/geometry.hpp"
#include "chargelab/rng.hpp"
#include "doctest.h"

using namespace chargelab;

TEST_CASE("gauges of the standard bodies") {
  const Vec x = {0.3, -0.5, 0.2};
  CHECK(ConvexBody::box(3).gauge(x) == doctest::Approx(0.5));
  CHECK(ConvexBody::cross_polytope(3).gauge(x) == doctest::Approx(1.0));
  CHECK(ConvexBody::pball(3, 2.0).gauge(x) == doctest::Approx(std::sqrt(0.09 + 0.25 + 0.04)));
  const Vec half = {2.0, 0.5, 1.0};
  CHECK(ConvexBody::box(half).gauge(x) == doctest::Approx(1.0));
  const ConvexBody hex = ConvexBody::regular_polygon(6, 2.0);
  CHECK(hex.gauge(Vec{2.0, 0.0}) == doctest::Approx(1.0));
  CHECK(hex.gauge(Vec{0.0, std::sqrt(3.0)}) == doctest::Approx(1.0));
  CHECK(hex.gauge(Vec{0.0, 0.0}) == 0.0);
}

TEST_CASE("polar norms are the dual norms") {
  const Vec y = {0.3, -0.5, 0.2};
  CHECK(ConvexBody::box(3).polar_norm(y) == doctest::Approx(1.0));
  CHECK(ConvexBody::cross_polytope(3).polar_norm(y) == doctest::Approx(0.5));
  const double q = 3.0;  // dual of p = 1.5
  const double qnorm = std::pow(std::pow(0.3, q) + std::pow(0.5, q) + std::pow(0.2, q), 1.0 / q);
  CHECK(ConvexBody::pball(3, 1.5).polar_norm(y) == doctest::Approx(qnorm).epsilon(1e-9));
}

TEST_CASE("duality inequality on random samples") {
  SplitMix64 rng(17);
  const ConvexBody bodies[] = {ConvexBody::box(2), ConvexBody::cross_polytope(2), ConvexBody::pball(2, 4.0),
                               ConvexBody::regular_polygon(8)};
  for (const auto& K : bodies) {
    for (int k = 0; k < 500; ++k) {
      const Vec x = {rng.normal(), rng.normal()};
      const Vec y = {rng.normal(), rng.normal()};
      CHECK(std::abs(dot(x, y)) <= K.gauge(x) * K.polar_norm(y) * (1 + 1e-12));
    }
  }
}

TEST_CASE("gauge gradient is a unit polar vector") {
  SplitMix64 rng(5);
  const ConvexBody bodies[] = {ConvexBody::box(3), ConvexBody::cross_polytope(3), ConvexBody::pball(3, 3.0)};
  for (const auto& K : bodies) {
    for (int k = 0; k < 50; ++k) {
      const Vec x = {rng.normal(), rng.normal(), rng.normal()};
      Vec g(3);
      K.gauge_gradient(x, g);
      CHECK(K.polar_norm(g) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(dot(g, x) == doctest::Approx(K.gauge(x)).epsilon(1e-9));  // Euler relation
    }
  }
}

TEST_CASE("convex hull of a square is recognized as an axis box") {
  const ConvexBody sq = ConvexBody::from_vertices({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {0.5, 0.2}});
  CHECK(sq.is_axis_box());
  CHECK(sq.vertices().size() == 4);
  CHECK(sq.facets().size() == 4);
  CHECK_FALSE(ConvexBody::cross_polytope(2).is_axis_box());
}

TEST_CASE("invalid bodies and cones are rejected") {
  CHECK_THROWS_AS(ConvexBody::pball(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::regular_polygon(5), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::from_vertices({{1, 0}, {0, 1}, {-1, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(Cone::orthant(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::box(0), std::invalid_argument);
}

TEST_CASE("cone membership and edge weights") {
  const Cone c = Cone::orthant(2, 1);
  CHECK(c.contains(Vec{0.1, -3.0}));
  CHECK_FALSE(c.contains(Vec{0.0, 1.0}));
  CHECK(c.contains_closure(Vec{0.0, 1.0}));
  CHECK(c.quadrature_weight(Vec{0.0, 1.0}, 1e-12) == 0.5);
  CHECK(c.quadrature_weight(Vec{-0.1, 1.0}, 1e-12) == 0.0);
  CHECK(edge_weight(1e-3, 1e-9) == 1.0);
  CHECK(edge_weight(0.0, 1e-9) == 0.5);
  CHECK(edge_weight(-1e-3, 1e-9) == 0.0);
  const Cone wedge = Cone::halfspaces(2, {{1.0, 1.0}, {1.0, -1.0}});
  CHECK(wedge.contains(Vec{1.0, 0.5}));
  CHECK_FALSE(wedge.contains(Vec{1.0, 1.5}));
  CHECK_FALSE(wedge.orthant_m().has_value());
}

TEST_CASE("exact volumes of box-orthant pairs") {
  for (int d = 1; d <= 4; ++d)
    for (int m = 0; m <= d; ++m)
      CHECK(volume_body_cone(ConvexBody::box(d), Cone::orthant(d, m), VolumeMethod::exact()).value ==
            std::pow(2.0, d - m));
  CHECK_THROWS_AS(volume_body_cone(ConvexBody::cross_polytope(2), Cone::orthant(2, 0), VolumeMethod::exact()),
                  std::invalid_argument);
}

TEST_CASE("grid and Monte Carlo volumes agree with known areas") {
  const double pi = std::acos(-1.0);
  const Cone all = Cone::orthant(2, 0);
  CHECK(volume_body_cone(ConvexBody::cross_polytope(2), all, VolumeMethod::grid(256)).value ==
        doctest::Approx(2.0).epsilon(1e-3));
  CHECK(volume_body_cone(ConvexBody::pball(2, 2.0), all, VolumeMethod::grid(512)).value ==
        doctest::Approx(pi).epsilon(1e-3));
  // quarter of the cross polytope
  CHECK(volume_body_cone(ConvexBody::cross_polytope(2), Cone::orthant(2, 2), VolumeMethod::grid(256)).value ==
        doctest::Approx(0.5).epsilon(1e-3));
  const Estimate mc = volume_body_cone(ConvexBody::pball(3, 2.0), Cone::orthant(3, 0),
                                       VolumeMethod::monte_carlo(200000, 3));
  CHECK(std::abs(mc.value - 4.0 / 3.0 * pi) <= 5.0 * mc.std_error);
  // hexagon with circumradius 1: 3√3/2
  CHECK(volume_body_cone(ConvexBody::regular_polygon(6), all) == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(2e-3));
}

TEST_CASE("layer cake integral matches d h^{d+1}/(d+1) vol for several bodies") {
  for (double h : {0.5, 1.0, 2.0}) {
    const double exact = layer_cake_closed_form(2, h, 2.0);
    CHECK(layer_cake_integral(ConvexBody::cross_polytope(2), Cone::orthant(2, 0), h, VolumeMethod::grid(256)).value ==
          doctest::Approx(exact).epsilon(2e-3));
    const double pi = std::acos(-1.0);
    CHECK(layer_cake_integral(ConvexBody::pball(2, 2.0), Cone::orthant(2, 1), h, VolumeMethod::grid(256)).value ==
          doctest::Approx(layer_cake_closed_form(2, h, pi / 2)).epsilon(2e-3));
  }
  // 1-D by hand: ∫_{-h}^{h} |u| du = h²
  CHECK(layer_cake_closed_form(1, 3.0, 2.0) == doctest::Approx(9.0));
}
