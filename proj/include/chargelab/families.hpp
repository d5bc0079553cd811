#pragma once

// Built-in test inputs: compactly supported charge densities with analytic
// gradients, and functions with analytic mixed derivatives ∂_I f.

#include <cstdint>
#include <string>
#include <vector>

#include "chargelab/geometry.hpp"
#include "chargelab/grid.hpp"
#include "chargelab/steklov.hpp"

namespace chargelab {

// ---------------------------------------------------------------------------
// Charge densities

// amplitude·exp(-|x - center|²/width²). Not compactly supported: the grid must
// be wide enough for the tail to fall below the charge truncation threshold.
GridField gaussian_density(const GridSpec& grid, Vec center, double width, double amplitude = 1.0);

// amplitude·(1 - |x - center|²/radius²)_+³, a C² bump.
GridField poly_bump_density(const GridSpec& grid, Vec center, double radius, double amplitude = 1.0);

// Π sin(π x_i) on [0, 2]^d, zero elsewhere.
GridField sin_density(const GridSpec& grid);

// Sum of `bumps` poly bumps with random centers, radii and signed amplitudes,
// all supported inside the box Π[lo_i + margin, hi_i - margin] of the grid.
GridField random_smooth_density(const GridSpec& grid, std::uint64_t seed, int bumps = 3);

// White noise smoothed by `passes` box filters of half width `radius` cells,
// multiplied by a poly bump of the given radius around θ. Sample-only.
GridField filtered_noise_density(const GridSpec& grid, std::uint64_t seed, double support_radius,
                                 int radius = 2, int passes = 3);

// Densities from a CSV of "index,value" rows (flat cell index, row-major with
// the last axis fastest). Missing cells are zero; a header line is allowed.
GridField load_density_csv(const GridSpec& grid, const std::string& path);

// ---------------------------------------------------------------------------
// Mixed-derivative families (K = (-1,1)^d)

// ∫_0^h Π min(b_i, t) dt for b_i >= 0: the integral of (h - max_i u_i)_+ over
// the box Π[0, b_i].
double cube_gauge_mass(std::span<const double> b, double h);

// ∫_0^{x_1}…∫_0^{x_d} (h - |u|_∞)_+ du (oriented).
double cube_antiderivative(std::span<const double> x, double h);

// a in (0, h) with equal integrals of (h - |x|_∞)_+ over {0 < x_1 < a} and
// {x_1 > a} within the cone R_+ x R^{d-1}.
double split_point(double h, int d);

// f with ∂_I f = (h - |x|_∞)_+ and f = 0 on the coordinate hyperplanes.
MixedFunction extremal_mixed_m0(double h, int d);

// g(x) = ∫_a^{x_1}∫_0^{x_2}…∫_0^{x_d} (h - |u|_∞)_+ du with a = split_point(h, d).
MixedFunction extremal_mixed_m1(double h, int d);

// ∂_I f = (h - |x - c|_∞)_+ with lower integration limits a:
// f(x) = ∫_{a_1}^{x_1}…∫_{a_d}^{x_d} (h - |u - c|_∞)_+ du.
MixedFunction shifted_cube_family(double h, Vec c, Vec a);

// Σ_k c_k Π_i sin(π n_{k,i} x_i + φ_{k,i}) with integer n_{k,i} in [1, max_freq]:
// period 2 along every axis, so sups over one period are global sups.
MixedFunction random_trig_polynomial(int d, std::uint64_t seed, int terms = 3, int max_freq = 2);

// amplitude·Π exp(-(x_i - c_i)²/width²)
MixedFunction gaussian_product(Vec center, double width, double amplitude = 1.0);

// Π x_i
MixedFunction coordinate_product(int d);

// Samples f.value on the grid (keeping the value callback).
GridField sample_value(const MixedFunction& f, const GridSpec& grid);
// Samples ∂_I f on the grid, with value and gradient callbacks.
GridField sample_mixed(const MixedFunction& f, const GridSpec& grid);

}  // namespace chargelab
