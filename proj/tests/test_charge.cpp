#include <cmath>
#include <stdexcept>

#include "chargelab/charge.hpp"
#include "chargelab/families.hpp"
#include "chargelab/rng.hpp"
#include "doctest.h"

using namespace chargelab;

TEST_CASE("grid indexing") {
  const GridSpec g({-1.0, 0.0, -2.0}, {1.0, 1.0, 2.0}, {4, 5, 8});
  CHECK(g.size() == 160);
  CHECK(g.describe() == "4x5x8");
  std::vector<long> idx(3);
  Vec x(3);
  for (std::size_t flat : {0ul, 7ul, 63ul, 159ul}) {
    g.unflatten(flat, idx);
    CHECK(g.flat_index(idx) == flat);
    g.center(flat, x);
    REQUIRE(g.center_index(x).has_value());
    CHECK(*g.center_index(x) == flat);
  }
  CHECK(g.center(0, 0) == doctest::Approx(-0.75));
  CHECK_FALSE(g.center_index(Vec{0.0, 0.5, 0.0}).has_value());
  const GridSpec s = GridSpec::symmetric(Cone::orthant(2, 1), Vec{1.0, 1.0}, 16);
  CHECK(s.cells(0) == 8);
  CHECK(s.cells(1) == 16);
  CHECK(s.lo(0) == 0.0);
  CHECK(s.spacing(0) == doctest::Approx(s.spacing(1)));
  CHECK_THROWS_AS(GridSpec::symmetric(Cone::orthant(2, 0), Vec{1.0, 1.0}, 7), std::invalid_argument);
}

TEST_CASE("axis terms give half weights on centers that sit on an edge") {
  const GridSpec g({0.0}, {8.0}, {8});  // centers at 0.5, 1.5, ...
  const std::vector<double> v = {1, 2, 4, 8, 16, 32, 64, 128};
  const PrefixSumTable t(g, v);
  // (0.5, 2.5): center 0.5 and 2.5 on the edges, 1.5 inside
  const AxisTerms a = axis_terms(g, 0, 0.5, 2.5);
  CHECK(t.weighted_sum(std::span<const AxisTerms>(&a, 1)) == doctest::Approx(0.5 * 1 + 2 + 0.5 * 4));
  const AxisTerms b = axis_terms(g, 0, 1.0, 3.0);
  CHECK(t.weighted_sum(std::span<const AxisTerms>(&b, 1)) == doctest::Approx(2 + 4));
  const AxisTerms c = axis_terms(g, 0, -3.0, 0.9);
  CHECK(c.clipped);
  CHECK(t.weighted_sum(std::span<const AxisTerms>(&c, 1)) == doctest::Approx(1));
}

TEST_CASE("prefix-sum windows equal direct sums") {
  SplitMix64 rng(8);
  for (int d = 1; d <= 3; ++d) {
    for (int m = 0; m <= d; ++m) {
      const Cone C = Cone::orthant(d, m);
      const ConvexBody K = ConvexBody::box(d);
      const GridSpec grid = GridSpec::symmetric(C, Vec(d, 1.5), d == 3 ? 16 : 32);
      const Charge nu(random_smooth_density(grid, 3 * d + m), C);
      for (double h : {0.25, 0.6}) {
        const auto a = window_sums_at_centers(nu, K, h, WindowPath::prefix_sum);
        const auto b = window_sums_at_centers(nu, K, h, WindowPath::direct);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10).scale(1.0));
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = rng.uniform(i < m ? 0.0 : -1.0, 1.0);
        CHECK(charge_of_window(nu, y, K, h, WindowPath::prefix_sum).value ==
              doctest::Approx(charge_of_window(nu, y, K, h, WindowPath::direct).value).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("general bodies and cones: run sums equal direct sums") {
  struct Case {
    ConvexBody K;
    Cone C;
  };
  const Case cases[] = {{ConvexBody::cross_polytope(2), Cone::halfspaces(2, {{1.0, 1.0}})},
                        {ConvexBody::pball(2, 3.0), Cone::orthant(2, 1)},
                        {ConvexBody::regular_polygon(6), Cone::orthant(2, 0)},
                        {ConvexBody::cross_polytope(3), Cone::orthant(3, 1)}};
  for (const auto& c : cases) {
    const int d = c.K.dimension();
    const GridSpec grid = aligned_grid(c.K, c.C, 0.5, d == 3 ? 16 : 32);
    const Charge nu(extremal_density(c.K, c.C, 0.5, grid), c.C);
    CHECK_THROWS_AS(window_sums_at_centers(nu, c.K, 0.4, WindowPath::prefix_sum), std::invalid_argument);
    const auto a = window_sums_at_centers(nu, c.K, 0.4);
    const auto b = window_sums_at_centers(nu, c.K, 0.4, WindowPath::direct);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::isnan(a[i]) == std::isnan(b[i]));
      if (!std::isnan(a[i])) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("extremal charge: sup, gradient and window norm") {
  for (int d = 1; d <= 2; ++d) {
    for (int m = 0; m <= d; ++m) {
      const ConvexBody K = ConvexBody::box(d);
      const Cone C = Cone::orthant(d, m);
      const double h = 0.75;
      const Charge nu(extremal_density(K, C, h, aligned_grid(K, C, h, 64)), C);
      CHECK(sup_abs(nu.density(), C).value == doctest::Approx(h));
      const GradientSup g = grad_sup_polar(nu.density(), K, C);
      CHECK(g.value == doctest::Approx(1.0));
      CHECK_FALSE(g.finite_difference);
      const double vol = std::pow(2.0, d - m);
      const double mass = std::pow(h, d + 1) / (d + 1) * vol;
      CHECK(seminorm_Kh(nu, K, h).value == doctest::Approx(mass).epsilon(2e-2));
      CHECK(l1_norm(nu.density(), C) == doctest::Approx(mass).epsilon(2e-2));
      CHECK(nu.total() == doctest::Approx(l1_norm(nu.density(), C)));
      const SeminormK sk = seminorm_K(nu, K, 2.0, 30, std::vector<double>{h});
      CHECK(sk.value == doctest::Approx(mass).epsilon(2e-2));
      CHECK_FALSE(sk.degenerate);
    }
  }
}

TEST_CASE("window norm of the extremal charge in 1-D is exactly the tent area") {
  // spacing aligned with h: midpoint rule on a piecewise linear function is exact
  const ConvexBody K = ConvexBody::box(1);
  const Cone C = Cone::orthant(1, 0);
  const Charge nu(extremal_density(K, C, 1.0, aligned_grid(K, C, 1.0, 64)), C);
  // ∫_{-1}^{1} (1 - |x|) dx
  CHECK(seminorm_Kh(nu, K, 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero charge is degenerate") {
  const Cone C = Cone::orthant(2, 0);
  const Charge nu(GridField::zeros(GridSpec::symmetric(C, Vec{1.0, 1.0}, 16)), C);
  const SeminormK sk = seminorm_K(nu, ConvexBody::box(2), 2.0, 10);
  CHECK(sk.value == 0.0);
  CHECK(sk.degenerate);
}

TEST_CASE("truncation rule") {
  const Cone C = Cone::orthant(2, 0);
  const GridSpec grid = GridSpec::symmetric(C, Vec{1.0, 1.0}, 16);
  const GridField wide = gaussian_density(grid, Vec{0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(Charge(wide, C), std::invalid_argument);
  const Charge nu(wide, C, true);
  CHECK(nu.truncation_risk());
  CHECK(charge_of_window(nu, Vec{0.9, 0.0}, ConvexBody::box(2), 0.5).truncation_risk);
  CHECK_FALSE(charge_of_window(nu, Vec{0.0, 0.0}, ConvexBody::box(2), 0.5).truncation_risk);
  // the cone face x_1 = 0 is not an outer layer
  const Cone half = Cone::orthant(2, 1);
  const GridSpec g2 = GridSpec::symmetric(half, Vec{1.0, 1.0}, 32);
  CHECK_NOTHROW(Charge(poly_bump_density(g2, Vec{0.0, 0.0}, 0.8), half));
}

TEST_CASE("gaussian charge has total mass π w² A in 2-D") {
  const Cone C = Cone::orthant(2, 0);
  const GridSpec grid = GridSpec::symmetric(C, Vec{4.0, 4.0}, 128);
  const Charge nu(gaussian_density(grid, Vec{0.0, 0.0}, 0.5, 2.0), C);
  CHECK(nu.total() == doctest::Approx(std::acos(-1.0) * 0.25 * 2.0).epsilon(1e-8));
}

TEST_CASE("sample-only fields use finite differences") {
  const Cone C = Cone::orthant(1, 0);
  const GridSpec grid = GridSpec::symmetric(C, Vec{2.0}, 400);
  const GridField f = poly_bump_density(grid, Vec{0.0}, 1.0);
  const GridField raw(grid, std::vector<double>(f.values().begin(), f.values().end()));
  const GradientSup a = grad_sup_polar(f, ConvexBody::box(1), C);
  const GradientSup b = grad_sup_polar(raw, ConvexBody::box(1), C);
  CHECK(b.finite_difference);
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-3));
}

TEST_CASE("sup over C includes θ through the value callback") {
  const Cone C = Cone::orthant(1, 1);
  const GridSpec grid({0.0}, {2.0}, {8});
  const GridField f = GridField::sample(grid, [](std::span<const double> x) { return 1.0 - x[0]; });
  const SupEstimate s = sup_abs(f, C);
  CHECK(s.value == doctest::Approx(1.0));
  CHECK(s.argmax[0] == 0.0);
}
