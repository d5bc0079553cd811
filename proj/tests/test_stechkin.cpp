#include <cmath>
#include <stdexcept>

#include "chargelab/families.hpp"
#include "chargelab/stechkin.hpp"
#include "doctest.h"

using namespace chargelab;

TEST_CASE("closed forms in one dimension") {
  const ProblemSetting s = ProblemSetting::charge(ConvexBody::box(1), Cone::orthant(1, 0));
  CHECK(s.volume() == 2.0);
  CHECK(omega(s, 1.0) == doctest::Approx(1.0));
  CHECK(stechkin_error(s, 1.0) == doctest::Approx(0.25));
  // operator norm 1/(2h): N = 1 at h = 1/2, and E_N = h/2
  CHECK(operator_norm(s, 0.5) == doctest::Approx(1.0));
  CHECK(optimal_h_for_N(s, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("mixed closed forms") {
  const ProblemSetting s = ProblemSetting::mixed(2, 1);
  CHECK(s.volume() == 2.0);
  CHECK(s.effective_volume() == 0.5);
  CHECK(omega(s, 1.0) == doctest::Approx(std::cbrt(6.0)));
  CHECK(stechkin_error(s, 1.0) == doctest::Approx(2.0 / 3.0 * std::sqrt(2.0)));
  CHECK(operator_norm(s, 0.5) == doctest::Approx(8.0));
  CHECK_THROWS_AS(ProblemSetting::mixed(2, 3), std::invalid_argument);
}

TEST_CASE("curve is a power law with slope -1/d") {
  for (int d = 1; d <= 3; ++d) {
    const ProblemSetting s = ProblemSetting::charge(ConvexBody::box(d), Cone::orthant(d, 0));
    const auto Ns = log_space(1e-2, 1e2, 9);
    CHECK(Ns.front() == doctest::Approx(1e-2));
    CHECK(Ns.back() == doctest::Approx(1e2));
    const auto curve = stechkin_curve(s, Ns);
    for (std::size_t k = 1; k < curve.size(); ++k) {
      const double slope = std::log(curve[k].error / curve[k - 1].error) / std::log(curve[k].N / curve[k - 1].N);
      CHECK(std::abs(slope + 1.0 / d) <= 1e-6);
      CHECK(operator_norm(s, curve[k].h) == doctest::Approx(curve[k].N));
      // the averaging step of norm N has deviation dh/(d+1) = E_N
      CHECK(curve[k].error == doctest::Approx(d * curve[k].h / (d + 1)));
    }
  }
}

TEST_CASE("optimal step balances the additive bound") {
  for (int d = 1; d <= 3; ++d) {
    for (int m = 0; m <= d; ++m) {
      for (const ProblemSetting& s :
           {ProblemSetting::charge(ConvexBody::box(d), Cone::orthant(d, m)), ProblemSetting::mixed(d, m)}) {
        for (double delta : {1e-3, 0.1, 5.0}) {
          const double h = optimal_h_for_delta(s, delta);
          CHECK(additive_bound(s, h, delta) == doctest::Approx(omega(s, delta)).epsilon(1e-12));
          CHECK(additive_bound(s, 1.05 * h, delta) > omega(s, delta));
          CHECK(additive_bound(s, 0.95 * h, delta) > omega(s, delta));
        }
      }
    }
  }
}

TEST_CASE("sandwich: Ω(δ) = inf_N {E_N + Nδ}") {
  const ProblemSetting s = ProblemSetting::charge(ConvexBody::cross_polytope(2), Cone::orthant(2, 1));
  for (const auto& row : sandwich_check(s, log_space(1e-4, 1e4, 9))) {
    CHECK(row.ok);
    CHECK(row.relative_gap <= 1e-6);
    CHECK(row.inf_value >= row.omega * (1 - 1e-12));
  }
}

TEST_CASE("worst-case recovery hugs Ω(δ)") {
  for (double delta : {0.01, 1.0}) {
    const RecoveryDemo demo = worst_case_recovery(ConvexBody::box(1), Cone::orthant(1, 0), delta, 256);
    CHECK(demo.error == doctest::Approx(demo.omega).epsilon(1e-3));
    CHECK(demo.result->h == doctest::Approx(optimal_h_for_delta(ProblemSetting::charge(ConvexBody::box(1),
                                                                                          Cone::orthant(1, 0)),
                                                                   delta)));
    const RecoveryDemo mixed = worst_case_mixed_recovery(2, 1, delta, 32);
    CHECK(std::abs(mixed.error - mixed.omega) <= 1e-3);
  }
  CHECK_THROWS_AS(worst_case_mixed_recovery(2, 2, 0.1, 32), std::invalid_argument);
}

TEST_CASE("typical inputs stay below Ω(δ)") {
  const RecoveryDemo a = typical_recovery(ConvexBody::box(2), Cone::orthant(2, 1), 0.1, 64, 3);
  CHECK(a.error < a.omega);
  CHECK(a.perturbation_norm == doctest::Approx(0.1).epsilon(1e-9));
  const RecoveryDemo b = typical_mixed_recovery(2, 0, 0.1, 64, 3);
  CHECK(b.error < b.omega);
  CHECK_FALSE(b.warnings.empty());  // step snapped to the grid
}

TEST_CASE("noise-free data: the error is the pure deviation") {
  const ConvexBody K = ConvexBody::box(1);
  const Cone C = Cone::orthant(1, 0);
  const double h_truth = 1.0;
  const GridField truth = extremal_density(K, C, h_truth, aligned_grid(K, C, h_truth, 256));
  const double delta = 0.01;
  const RecoveryResult r = recover_derivative(Charge(truth, C), delta, K);
  // at θ: S_h ν = (2h - h²)/(2h) = 1 - h/2 against the true density 1
  CHECK(recovery_error(r, truth, C).value == doctest::Approx(r.h / 2).epsilon(1e-2));
  CHECK(recovery_error(r, truth, C).value <= r.bound);
  CHECK_THROWS_AS(recover_derivative(Charge(truth, C), 0.0, K), std::invalid_argument);
}
