#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace chargelab {

struct ScalarOptimum {
  double x;
  double value;
};

// Golden-section search for a minimum of f on [a, b]. Runs `iterations` interval
// reductions, or stops earlier once the bracket is narrower than x_tol.
template <class F>
ScalarOptimum golden_section_minimize(F&& f, double a, double b, int iterations, double x_tol = 0.0) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (b < a) std::swap(a, b);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < iterations && (b - a) > x_tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? ScalarOptimum{x1, f1} : ScalarOptimum{x2, f2};
}

template <class F>
ScalarOptimum golden_section_maximize(F&& f, double a, double b, int iterations, double x_tol = 0.0) {
  auto r = golden_section_minimize([&](double x) { return -f(x); }, a, b, iterations, x_tol);
  return {r.x, -r.value};
}

// Root of a continuous f with f(a), f(b) of opposite signs, to |f| < f_tol or a
// bracket narrower than x_tol.
template <class F>
double bisect(F&& f, double a, double b, double f_tol, double x_tol = 0.0, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw std::domain_error("bisection: root is not bracketed");
  double mid = 0.5 * (a + b);
  for (int it = 0; it < max_iter; ++it) {
    mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (std::abs(fm) < f_tol || (b - a) <= x_tol) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return mid;
}

}  // namespace chargelab
