#pragma once

// Landau–Kolmogorov type inequalities for charges and for mixed derivatives,
// evaluated numerically and packaged as reports.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chargelab/charge.hpp"
#include "chargelab/steklov.hpp"

namespace chargelab {

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct InequalityReport {
  std::string case_id;
  std::string kind;  // additive-charge, multiplicative-charge, nagy, additive-mixed, multiplicative-mixed
  int d = 0;
  int m = 0;
  double h = 0.0;
  std::string grid;

  double lhs = 0.0;
  std::vector<NamedValue> rhs_terms;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs

  // Intermediate bound between lhs and rhs (NaN when the inequality has none).
  double chain = std::numeric_limits<double>::quiet_NaN();
  std::vector<NamedValue> chain_terms;

  bool expect_equality = false;
  bool equality = false;  // |slack| <= tolerance
  double tolerance = 1e-6;

  std::vector<std::pair<std::string, Vec>> argmax;
  double coverage = 1.0;
  std::vector<std::string> warnings;

  bool chain_ordered() const;
  // slack >= -tolerance, chain ordered, and equality when expected
  bool passed() const;
  // Names of the checks that failed; empty when passed().
  std::vector<std::string> failures() const;
};

// 1e-6 for general inputs; max(1e-3, 2·max spacing) where equality is expected.
double report_tolerance(const GridSpec& grid, bool expect_equality);

struct CheckOptions {
  std::string case_id;
  bool expect_equality = false;
  // Largest h probed for ‖ν‖_K; 0 picks twice the largest gauge of a grid corner.
  double h_max = 0.0;
  int refine_iters = 40;
};

// sup|D_μν| <= dh/(d+1)·sup|∇D_μν|_{K°} + ‖ν‖_{K,h}/(h^d μ(K∩C)), with the chain
// link deviation_sup + ‖S_h‖·‖ν‖_{K,h}.
InequalityReport lk_additive_charge(const Charge& nu, const ConvexBody& body, double h,
                                    const CheckOptions& opts = {});

// sup|D_μν| <= ((d+1)/μ(K∩C))^{1/(d+1)}·sup|∇D_μν|_{K°}^{d/(d+1)}·‖ν‖_K^{1/(d+1)}.
// The chain link is the additive right-hand side at the optimal h.
InequalityReport lk_multiplicative_charge(const Charge& nu, const ConvexBody& body, const CheckOptions& opts = {});

// sup|f| <= dh/(d+1)·sup|∇f|_{K°} + ‖f‖_{L1(C)}/(h^d μ(K∩C)).
InequalityReport nagy_inequality(const GridField& f, const ConvexBody& body, const Cone& cone, double h,
                                 const CheckOptions& opts = {});

// Minimizer of the additive bound over h: ((d+1)‖ν‖_K / (μ(K∩C)·G))^{1/(d+1)},
// G the gradient sup.
double optimal_h_charge(int d, double volume, double gradient_sup, double seminorm);

// Mixed derivatives on R^m_+ x R^{d-m} with K = (-1,1)^d. Sups are taken over
// the grid centers in C and θ (through the callbacks); the chain through S̄_h
// uses the centers whose stencil fits in the grid, plus θ.
InequalityReport lk_additive_mixed(const MixedFunction& f, const GridSpec& grid, const MixedParams& p,
                                   const CheckOptions& opts = {});
InequalityReport lk_multiplicative_mixed(const MixedFunction& f, const GridSpec& grid, int m,
                                         const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// Exploratory search for the multiplicative mixed inequality with m >= 1,
// over f with ∂_I f = (h - |x - c|_∞)_+ and lower limits a (see
// shifted_cube_family). All sups are closed-form, so ratios are exact.

struct SharpnessCandidate {
  Vec c;  // tent center; only the first m coordinates vary
  Vec a;  // lower integration limits
  double ratio = 0.0;
};

struct SharpnessResult {
  int d = 0;
  int m = 0;
  SharpnessCandidate best;
  std::vector<std::pair<int, double>> trajectory;  // (evaluation, best ratio so far)
  int evaluations = 0;
  bool exploratory = true;
};

// LHS/RHS of the multiplicative mixed inequality for one candidate (h = 1).
double sharpness_ratio(int d, int m, std::span<const double> c, std::span<const double> a);

SharpnessResult sharpness_search(int d, int m, int budget, std::uint64_t seed);

}  // namespace chargelab
