#pragma once

// Weighted window sums over grid samples for axis-aligned box windows.
//
// A window is an open box Π(lo_i, hi_i). A sample counts with weight 1 when its
// cell center is strictly inside, and with weight 1/2 per axis when the center
// sits on a window edge. Along one axis those weights reduce to a short linear
// combination of prefix sums P(k) = Σ_{j<k} v_j, which is all that is stored.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "chargelab/grid.hpp"

namespace chargelab {

struct AxisTerms {
  struct Term {
    long index;   // position in the prefix array, 0..n
    double coef;
  };
  std::array<Term, 4> terms{};
  int count = 0;
  bool clipped = false;  // the interval reaches past the grid on this axis

  std::span<const Term> view() const { return {terms.data(), static_cast<std::size_t>(count)}; }
};

// Prefix-sum coefficients for the open interval (lo, hi) on one grid axis.
AxisTerms axis_terms(const GridSpec& grid, int axis, double lo, double hi);

// d-dimensional summed-area table: entry (k_0..k_{d-1}) holds the sum of all
// samples with j_i < k_i. Any weighted box query takes at most 4^d lookups and
// 2^d when no edge falls on a center.
class PrefixSumTable {
 public:
  PrefixSumTable(const GridSpec& grid, std::span<const double> values);

  double at(std::span<const long> k) const;
  // Σ_j Π_i w_i(j_i) v_j for per-axis weights given as prefix terms.
  double weighted_sum(std::span<const AxisTerms> axes) const;
  // Plain sum over the index box [first, last).
  double box_sum(std::span<const long> first, std::span<const long> last) const;

 private:
  int dim_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;
};

// Window sums at every cell center in one sweep: each axis is filtered in turn
// with 1-D prefix sums over each grid line. `terms_per_axis[a][j]` are the
// coefficients of the window centered (in the caller's sense) on center j of
// axis a. Returns raw weighted sums (not multiplied by the cell volume).
std::vector<double> separable_window_sums(const GridSpec& grid, std::span<const double> values,
                                          const std::vector<std::vector<AxisTerms>>& terms_per_axis);

}  // namespace chargelab
