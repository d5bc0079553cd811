#pragma once

// The averaging operator S_h ν(x) = ν(x + hK∩C) / (h^d μ(K∩C)) and the
// difference-quotient operator S̄_h of mixed derivatives on the orthant
// R^m_+ x R^{d-m} with K = (-1,1)^d.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chargelab/charge.hpp"
#include "chargelab/geometry.hpp"
#include "chargelab/grid.hpp"

namespace chargelab {

struct SteklovParams {
  ConvexBody body;
  Cone cone;
  double h;
  double volume;  // μ(K∩C)

  // μ(K∩C) exact when available, otherwise by a fine grid.
  static SteklovParams make(ConvexBody body, Cone cone, double h);
  SteklovParams(ConvexBody body, Cone cone, double h, double volume);
};

double steklov_apply(const Charge& nu, const SteklovParams& p, std::span<const double> x);

// Samples with a validity mask; used for operator outputs that are only defined
// where a window or stencil fits.
struct MaskedField {
  GridSpec grid;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  explicit MaskedField(const GridField& f);
  MaskedField(GridSpec grid, std::vector<double> values, std::vector<std::uint8_t> valid);
  std::size_t valid_count() const;
};

// S_h ν at every cell center (all valid for orthant grids; centers outside C are masked).
MaskedField steklov_field(const Charge& nu, const SteklovParams& p);

// 1 / (h^d μ(K∩C))
double steklov_norm(const SteklovParams& p);

struct DeviationSup {
  double value = 0.0;
  Vec argmax;
  double coverage = 1.0;  // fraction of candidates whose window sum loses no mass to the grid edge
  std::size_t candidates = 0;
};

// sup over cell centers in C and θ of |D_μν(x) - S_hν(x)|. D_μν at θ comes from
// the density's value callback; θ is skipped without one.
DeviationSup deviation_sup(const Charge& nu, const SteklovParams& p);

// ---------------------------------------------------------------------------
// Mixed derivatives

struct MixedParams {
  int d;
  int m;
  double h;

  MixedParams(int d, int m, double h);
  ConvexBody body() const { return ConvexBody::box(d); }
  Cone cone() const { return Cone::orthant(d, m); }
};

// f together with ∂_I f = ∂^d f/∂x_1…∂x_d and ∇∂_I f.
struct MixedFunction {
  std::string name;
  int d = 0;
  ScalarFn value;
  ScalarFn mixed;
  GradientFn mixed_gradient;
};

// Number of cells spanned by h along `axis`. Throws when h is not a positive
// integer multiple of the spacing, listing the nearest admissible values.
long commensurate_steps(const GridSpec& grid, int axis, double h);

// Δ⁺_{i,h} f(x) = f(x + h e_i) - f(x); masked where x + h e_i leaves the grid.
MaskedField diff_forward(const MaskedField& f, int axis, double h);
// Δ_{i,h} f(x) = f(x + h e_i) - f(x - h e_i)
MaskedField diff_central(const MaskedField& f, int axis, double h);

// S̄_h f at x: (Δ⁺_1…Δ⁺_m Δ_{m+1}…Δ_d f)(x) / (2^{d-m} h^d). Stencil values come
// from the grid when x and all nodes are cell centers, otherwise from the value
// callback.
double mixed_operator_apply(const GridField& f, const MixedParams& p, std::span<const double> x);

// S̄_h f at every cell center whose stencil fits, composed from the difference
// operators in the order Δ⁺_1 ∘ … ∘ Δ⁺_m ∘ Δ_{m+1} ∘ … ∘ Δ_d.
MaskedField mixed_operator_field(const GridField& f, const MixedParams& p);

// 2^m / h^d
double mixed_operator_norm(const MixedParams& p);

struct FubiniResidual {
  double integral = 0.0;     // ∫_{x+hK∩C} ∂_I f dμ by midpoint quadrature on `grid`
  double differences = 0.0;  // composed differences of f at x, from the value callback
  double residual = 0.0;
};

FubiniResidual fubini_identity_check(const MixedFunction& f, const GridSpec& grid, const MixedParams& p,
                                     std::span<const double> x);

}  // namespace chargelab
