#include <cmath>
#include <stdexcept>
#include <string>

#include "chargelab/families.hpp"
#include "chargelab/steklov.hpp"
#include "doctest.h"

using namespace chargelab;

namespace {

GridSpec mixed_grid(int d, int m, double extent, int n) {
  Vec lo(d), hi(d);
  std::vector<int> cells(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = i < m ? 0.0 : -extent;
    hi[i] = extent;
    cells[i] = i < m ? n / 2 : n;
  }
  return GridSpec(lo, hi, cells);
}

}  // namespace

TEST_CASE("operator norm and value at θ on the extremal charge") {
  for (int d = 1; d <= 2; ++d) {
    for (int m = 0; m <= d; ++m) {
      const ConvexBody K = ConvexBody::box(d);
      const Cone C = Cone::orthant(d, m);
      const double h = 1.0;
      const SteklovParams p = SteklovParams::make(K, C, h);
      CHECK(p.volume == std::pow(2.0, d - m));
      CHECK(steklov_norm(p) == doctest::Approx(1.0 / p.volume));
      const Charge nu(extremal_density(K, C, h, aligned_grid(K, C, h, 128)), C);
      // S_h ν_e(θ) = (mass of ν_e) / (h^d μ) = h/(d+1)
      CHECK(steklov_apply(nu, p, Vec(d, 0.0)) == doctest::Approx(h / (d + 1)).epsilon(5e-3));
    }
  }
}

TEST_CASE("deviation of the extremal charge is dh/(d+1)") {
  for (int d = 1; d <= 2; ++d) {
    for (int m = 0; m <= d; ++m) {
      const ConvexBody K = ConvexBody::box(d);
      const Cone C = Cone::orthant(d, m);
      for (double h : {0.5, 2.0}) {
        const Charge nu(extremal_density(K, C, h, aligned_grid(K, C, h, 128)), C);
        const DeviationSup dev = deviation_sup(nu, SteklovParams::make(K, C, h));
        CHECK(dev.value == doctest::Approx(d * h / (d + 1)).epsilon(5e-3));
        CHECK(dev.coverage == 1.0);
        for (double v : dev.argmax) CHECK(v == 0.0);
      }
    }
  }
}

TEST_CASE("steklov field masks centers outside a general cone") {
  const ConvexBody K = ConvexBody::box(2);
  const Cone C = Cone::halfspaces(2, {{1.0, 1.0}});
  const GridSpec grid = GridSpec::symmetric(C, Vec{2.0, 2.0}, 32);
  const Charge nu(poly_bump_density(grid, Vec{0.3, 0.3}, 0.8), C);
  const MaskedField s = steklov_field(nu, SteklovParams::make(K, C, 0.5));
  Vec x(2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    CHECK(static_cast<bool>(s.valid[i]) == C.contains(x));
  }
}

TEST_CASE("commensurate steps") {
  const GridSpec g({0.0}, {1.0}, {8});
  CHECK(commensurate_steps(g, 0, 0.25) == 2);
  CHECK(commensurate_steps(g, 0, 0.125) == 1);
  try {
    commensurate_steps(g, 0, 0.3);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0.25") != std::string::npos);
    CHECK(msg.find("0.375") != std::string::npos);
  }
}

TEST_CASE("differences of a linear function") {
  const GridSpec g({-1.0, -1.0}, {1.0, 1.0}, {16, 16});
  const GridField f = GridField::sample(g, [](std::span<const double> x) { return 3.0 * x[0] - x[1]; });
  const MaskedField mf(f);
  const MaskedField fwd = diff_forward(mf, 0, 0.25);
  const MaskedField cen = diff_central(mf, 1, 0.125);
  Vec x(2);
  std::size_t valid_fwd = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.center(i, x);
    if (fwd.valid[i]) {
      ++valid_fwd;
      CHECK(fwd.values[i] == doctest::Approx(0.75));
    }
    if (cen.valid[i]) CHECK(cen.values[i] == doctest::Approx(-0.25));
    CHECK(static_cast<bool>(fwd.valid[i]) == (x[0] + 0.25 < 1.0));
  }
  CHECK(valid_fwd == 14 * 16);
}

TEST_CASE("S̄_h reproduces ∂_I of the coordinate product") {
  for (int d = 1; d <= 3; ++d) {
    for (int m = 0; m <= d; ++m) {
      const MixedFunction f = coordinate_product(d);
      const GridSpec grid = mixed_grid(d, m, 1.0, 16);
      const MixedParams p(d, m, 0.25);
      CHECK(mixed_operator_norm(p) == doctest::Approx(std::pow(2.0, m) / std::pow(0.25, d)));
      const GridField samples = sample_value(f, grid);
      const MaskedField s = mixed_operator_field(samples, p);
      CHECK(s.valid_count() > 0);
      for (std::size_t i = 0; i < s.values.size(); ++i)
        if (s.valid[i]) CHECK(s.values[i] == doctest::Approx(1.0));
      Vec x(d, 0.3);
      CHECK(mixed_operator_apply(samples, p, x) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("operator field agrees with pointwise application") {
  const MixedFunction f = random_trig_polynomial(2, 4);
  const GridSpec grid = mixed_grid(2, 1, 1.0, 32);
  const MixedParams p(2, 1, 0.25);
  const GridField samples = sample_value(f, grid);
  const MaskedField s = mixed_operator_field(samples, p);
  Vec x(2);
  for (std::size_t i = 0; i < grid.size(); i += 7) {
    if (!s.valid[i]) continue;
    grid.center(i, x);
    CHECK(s.values[i] == doctest::Approx(mixed_operator_apply(samples, p, x)).epsilon(1e-10));
  }
}

TEST_CASE("Fubini identity residuals shrink with the grid") {
  const MixedFunction f = gaussian_product(Vec{0.1, -0.2}, 0.7);
  const MixedParams p(2, 1, 0.5);
  const Vec x = {0.25, 0.0};
  const double coarse = fubini_identity_check(f, mixed_grid(2, 1, 2.0, 64), p, x).residual;
  const double fine = fubini_identity_check(f, mixed_grid(2, 1, 2.0, 256), p, x).residual;
  CHECK(fine < 1e-4);
  CHECK(fine < coarse);
  CHECK_THROWS_AS(fubini_identity_check(f, mixed_grid(2, 1, 0.5, 16), p, Vec{0.25, 0.25}), std::invalid_argument);
}

TEST_CASE("mixed parameters are validated") {
  CHECK_THROWS_AS(MixedParams(2, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MixedParams(2, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MixedParams(0, 0, 1.0), std::invalid_argument);
}
