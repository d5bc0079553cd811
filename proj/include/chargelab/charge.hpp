#pragma once

// Charges dν = f dμ given by grid-sampled densities, the seminorms
// ‖ν‖_{K,h} = sup_y |ν(y + hK∩C)| and ‖ν‖_K = sup_h ‖ν‖_{K,h}, the extremal
// density (h - |x|_K)_+ and sup-norms of gradients in the polar gauge.

#include <memory>
#include <span>
#include <vector>

#include "chargelab/geometry.hpp"
#include "chargelab/grid.hpp"
#include "chargelab/window_sum.hpp"

namespace chargelab {

class Charge {
 public:
  // The density must vanish on the outer layer of cells (|f| <= 1e-12 sup|f|),
  // so that it is supported inside the grid. Pass allow_truncation to accept
  // other densities; window sums reaching past the grid are then flagged.
  Charge(GridField density, Cone cone, bool allow_truncation = false);

  const GridField& density() const { return density_; }
  const Cone& cone() const { return cone_; }
  const GridSpec& grid() const { return density_.grid(); }
  const PrefixSumTable& prefix_table() const { return *table_; }

  // max |f| over the outer layer of cells
  double boundary_max() const { return boundary_max_; }
  bool truncation_risk() const { return truncation_risk_; }

  // ν of the union of cells with index in [first, last) (grid-aligned set).
  double measure_of_cells(std::span<const long> first, std::span<const long> last) const;
  // ν(C ∩ grid)
  double total() const;

 private:
  GridField density_;
  Cone cone_;
  std::shared_ptr<const PrefixSumTable> table_;
  double boundary_max_ = 0.0;
  bool truncation_risk_ = false;
};

enum class WindowPath { automatic, prefix_sum, direct };

struct WindowSum {
  double value = 0.0;
  bool clipped = false;          // the window reaches past the grid
  bool truncation_risk = false;  // clipped and the density is not known to vanish there
};

// True when windows of K over C are axis-aligned boxes (box K, orthant C).
bool has_box_windows(const ConvexBody& body, const Cone& cone);

// ν(y + (hK∩C)) by the midpoint rule: sum of density·cell volume over cells
// whose centers lie in the window (edge centers count 1/2 per facet).
WindowSum charge_of_window(const Charge& nu, std::span<const double> y, const ConvexBody& body,
                           double h, WindowPath path = WindowPath::automatic);

// ν(c + (hK∩C)) for every cell center c, NaN where c ∉ C.
std::vector<double> window_sums_at_centers(const Charge& nu, const ConvexBody& body, double h,
                                           WindowPath path = WindowPath::automatic);

struct SupEstimate {
  double value = 0.0;
  Vec argmax;
  std::size_t candidates = 0;
  bool truncation_risk = false;
};

// sup over y ∈ {cell centers in C} ∪ {θ} of |ν(y + hK∩C)|.
SupEstimate seminorm_Kh(const Charge& nu, const ConvexBody& body, double h);

struct SeminormK {
  double value = 0.0;
  double argmax_h = 0.0;
  Vec argmax_y;
  bool degenerate = false;  // zero charge: the maximizing h is arbitrary
  std::vector<std::pair<double, double>> probes;  // (h, ‖ν‖_{K,h}) in evaluation order
};

// sup_h ‖ν‖_{K,h}: 32 log-spaced h in [h_max/1000, h_max], plus `extra_probes`,
// then golden-section refinement around the best scan point. Ties go to the
// smallest h within 1e-9.
SeminormK seminorm_K(const Charge& nu, const ConvexBody& body, double h_max, int refine_iters,
                     std::span<const double> extra_probes = {});

// (h - |x|_K)_+ on the closure of C, with analytic value and gradient callbacks.
GridField extremal_density(const ConvexBody& body, const Cone& cone, double h, const GridSpec& grid);

// Grid on which the windows hK∩C of the extremal charge are aligned with cell
// edges: spacing h·w_i/k along each axis (w = bounding half widths of K) with
// k = n/2 - max(2, n/32), and n cells across free axes.
GridSpec aligned_grid(const ConvexBody& body, const Cone& cone, double h, int n);

struct GradientSup {
  double value = 0.0;
  Vec argmax;
  bool finite_difference = false;
};

// sup over cell centers in C of |∇f(x)|_{K°}. Uses the analytic gradient when
// the field has one, otherwise central differences (one-sided at grid edges).
GradientSup grad_sup_polar(const GridField& f, const ConvexBody& body, const Cone& cone);

// sup over cell centers in C of |f|, plus θ through the value callback when the
// field has one and the grid covers θ (the limit from inside C).
SupEstimate sup_abs(const GridField& f, const Cone& cone);

// ∫_C |f| dμ by the midpoint rule.
double l1_norm(const GridField& f, const Cone& cone);

}  // namespace chargelab
