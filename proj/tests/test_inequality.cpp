#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chargelab/families.hpp"
#include "chargelab/inequality.hpp"
#include "chargelab/rng.hpp"
#include "doctest.h"

using namespace chargelab;

namespace {

// brute-force midpoint integral of (h - max u_i)_+ over Π[0, b_i]
double brute_gauge_mass(const Vec& b, double h, int n) {
  const int d = static_cast<int>(b.size());
  double total = 0.0;
  std::vector<int> idx(d, 0);
  double cell = 1.0;
  for (double v : b) cell *= v / n;
  while (true) {
    double g = 0.0;
    for (int i = 0; i < d; ++i) g = std::max(g, (idx[i] + 0.5) * b[i] / n);
    total += std::max(0.0, h - g) * cell;
    int a = d - 1;
    while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
    if (a < 0) break;
  }
  return total;
}

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

TEST_CASE("cube gauge mass against brute force") {
  CHECK(cube_gauge_mass(Vec{5.0, 5.0}, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(cube_gauge_mass(Vec{0.3}, 1.0) == doctest::Approx(0.3 - 0.045));
  CHECK(cube_gauge_mass(Vec{0.0, 1.0}, 1.0) == 0.0);
  for (const Vec& b : {Vec{0.3, 0.7}, Vec{0.2, 2.0}, Vec{0.5, 0.4, 0.9}}) {
    CHECK(cube_gauge_mass(b, 1.0) == doctest::Approx(brute_gauge_mass(b, 1.0, b.size() == 2 ? 800 : 120)).epsilon(1e-4));
  }
}

TEST_CASE("antiderivative is odd in each coordinate") {
  const Vec x = {0.4, -0.3};
  const Vec y = {0.4, 0.3};
  CHECK(cube_antiderivative(x, 1.0) == doctest::Approx(-cube_antiderivative(y, 1.0)));
  CHECK(cube_antiderivative(y, 1.0) == doctest::Approx(cube_gauge_mass(y, 1.0)));
}

TEST_CASE("split point") {
  CHECK(split_point(1.0, 1) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(split_point(2.0, 1) == doctest::Approx(2.0 * (1.0 - 1.0 / std::sqrt(2.0))).epsilon(1e-12));
  for (int d = 2; d <= 3; ++d) {
    const double a = split_point(1.0, d);
    Vec inner(d, 1.0), all(d, 1.0);
    inner[0] = a;
    CHECK(2.0 * cube_gauge_mass(inner, 1.0) == doctest::Approx(cube_gauge_mass(all, 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("mixed extremals: sups and mixed derivative") {
  for (int d = 1; d <= 3; ++d) {
    const double h = 1.5;
    const MixedFunction f = extremal_mixed_m0(h, d);
    const MixedFunction g = extremal_mixed_m1(h, d);
    CHECK(f.mixed(Vec(d, 0.0)) == doctest::Approx(h));
    CHECK(f.value(Vec(d, 10.0)) == doctest::Approx(std::pow(h, d + 1) / (d + 1)));
    Vec far(d, 10.0);
    CHECK(std::abs(g.value(far)) == doctest::Approx(std::pow(h, d + 1) / (2 * (d + 1))));
    Vec x(d, 0.2);
    Vec grad(d);
    f.mixed_gradient(x, grad);
    double l1 = 0.0;
    for (double v : grad) l1 += std::abs(v);
    CHECK(l1 == doctest::Approx(1.0));
  }
}

TEST_CASE("trig polynomial has period 2") {
  const MixedFunction f = random_trig_polynomial(2, 9);
  const Vec x = {0.31, -0.77};
  const Vec y = {2.31, 1.23};
  CHECK(f.value(x) == doctest::Approx(f.value(y)));
  CHECK(f.mixed(x) == doctest::Approx(f.mixed(y)));
}

TEST_CASE("charge inequality reports") {
  const ConvexBody K = ConvexBody::box(2);
  const Cone C = Cone::orthant(2, 1);
  SUBCASE("zero charge: all terms vanish") {
    const Charge nu(GridField::zeros(GridSpec::symmetric(C, Vec{1.0, 1.0}, 32)), C);
    const InequalityReport r = lk_additive_charge(nu, K, 1.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(r.passed());
    CHECK(lk_multiplicative_charge(nu, K).passed());
  }
  SUBCASE("extremal charge attains equality") {
    const double h = 1.0;
    const Charge nu(extremal_density(K, C, h, aligned_grid(K, C, h, 128)), C);
    CheckOptions opt;
    opt.expect_equality = true;
    const InequalityReport add = lk_additive_charge(nu, K, h, opt);
    CHECK(add.equality);
    CHECK(add.passed());
    CHECK(add.rhs_terms.size() == 2);
    CHECK(add.chain_ordered());
    const InequalityReport mult = lk_multiplicative_charge(nu, K, opt);
    CHECK(mult.h == doctest::Approx(h).epsilon(1e-2));
    CHECK(mult.passed());
    CHECK(nagy_inequality(nu.density(), K, C, h, opt).passed());
  }
  SUBCASE("a halved gradient breaks the inequality") {
    const GridSpec grid = aligned_grid(K, C, 1.0, 64);
    const GridField f = extremal_density(K, C, 1.0, grid);
    const GridField bad = f.with_gradient([f](std::span<const double> x, std::span<double> g) {
      f.gradient(x, g);
      for (auto& v : g) v *= 0.5;
    });
    const InequalityReport r = lk_additive_charge(Charge(bad, C), K, 1.0);
    CHECK(r.slack < 0.0);
    CHECK_FALSE(r.passed());
    const auto fails = r.failures();
    CHECK(std::find(fails.begin(), fails.end(), "negative-slack") != fails.end());
  }
  SUBCASE("smooth charges have positive slack") {
    const GridSpec grid = GridSpec::symmetric(C, Vec{3.0, 3.0}, 96);
    const Charge nu(gaussian_density(grid, Vec{0.4, 0.0}, 0.4), C);
    for (double h : {0.25, 1.0}) CHECK(lk_additive_charge(nu, K, h).slack > 0.0);
    CHECK(lk_multiplicative_charge(nu, K).slack > 0.0);
  }
}

TEST_CASE("optimal h of the additive bound") {
  // minimize dh/(d+1)·G + s/(h^d μ): h = ((d+1)s/(μG))^{1/(d+1)}
  CHECK(optimal_h_charge(2, 2.0, 1.0, 1.0 / 3.0) == doctest::Approx(std::cbrt(0.5)));
  const int d = 2;
  const double mu = 2.0, G = 1.3, s = 0.7;
  const double h = optimal_h_charge(d, mu, G, s);
  auto bound = [&](double t) { return d * t / (d + 1) * G + s / (std::pow(t, d) * mu); };
  CHECK(bound(h) <= bound(h * 1.01));
  CHECK(bound(h) <= bound(h * 0.99));
}

TEST_CASE("tolerances") {
  const GridSpec g({0.0}, {1.0}, {100});
  CHECK(report_tolerance(g, false) == 1e-6);
  CHECK(report_tolerance(g, true) == doctest::Approx(0.02));
  const GridSpec fine({0.0}, {1.0}, {10000});
  CHECK(report_tolerance(fine, true) == 1e-3);
}

TEST_CASE("mixed inequalities") {
  SUBCASE("extremals attain equality") {
    for (int m = 0; m <= 1; ++m) {
      const double h = 0.5;
      const MixedFunction f = m == 0 ? extremal_mixed_m0(h, 2) : extremal_mixed_m1(h, 2);
      CheckOptions opt;
      opt.expect_equality = true;
      const GridSpec grid = mixed_grid(2, m, 2 * h, 32);
      const InequalityReport add = lk_additive_mixed(f, grid, MixedParams(2, m, h), opt);
      CHECK(std::abs(add.slack) <= 1e-9);
      CHECK(add.passed());
      CHECK(lk_multiplicative_mixed(f, grid, m, opt).passed());
    }
  }
  SUBCASE("incommensurate steps fall back to the callback with a warning") {
    const MixedFunction f = gaussian_product(Vec{0.0, 0.0}, 0.5);
    const GridSpec grid = mixed_grid(2, 0, 3.0, 48);
    const InequalityReport r = lk_additive_mixed(f, grid, MixedParams(2, 0, 0.3));
    CHECK(r.passed());
    CHECK_FALSE(r.warnings.empty());
  }
}

TEST_CASE("sharpness ratio") {
  SUBCASE("the m = 1 extremal configuration has ratio 1") {
    for (int d = 1; d <= 3; ++d) {
      const Vec c(d, 0.0);
      Vec a(d, 0.0);
      a[0] = split_point(1.0, d);
      CHECK(sharpness_ratio(d, 1, c, a) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("random candidates never exceed 1") {
    SplitMix64 rng(12);
    for (int k = 0; k < 2000; ++k) {
      const int d = 1 + k % 3;
      const int m = 1 + k % d;
      Vec c(d, 0.0), a(d);
      for (int i = 0; i < m; ++i) c[i] = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < d; ++i) a[i] = rng.uniform(-2.0, 2.0);
      CHECK(sharpness_ratio(d, m, c, a) <= 1.0 + 1e-9);
    }
  }
  SUBCASE("search") {
    const SharpnessResult r = sharpness_search(2, 1, 4000, 1);
    CHECK(r.best.ratio >= 0.999);
    CHECK(r.best.ratio <= 1.0 + 1e-6);
    CHECK(r.exploratory);
    CHECK(r.evaluations == 4000);
    for (std::size_t i = 1; i < r.trajectory.size(); ++i) CHECK(r.trajectory[i].second >= r.trajectory[i - 1].second);
    CHECK_THROWS_AS(sharpness_search(2, 0, 100, 1), std::invalid_argument);
  }
}
