#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chargelab/geometry.hpp"

namespace chargelab {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

// Uniform rectangular grid of cells; samples live at cell centers. Flat indices
// are row-major with the last axis fastest.
class GridSpec {
 public:
  GridSpec(Vec lo, Vec hi, std::vector<int> cells);

  // Free axes span [-w_i, w_i] with n cells; orthant axes of `cone` span [0, w_i]
  // with n/2 cells, so the spacing is the same on both.
  static GridSpec symmetric(const Cone& cone, std::span<const double> half_widths, int n);

  int dimension() const { return static_cast<int>(lo_.size()); }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return dx_[axis]; }
  double min_spacing() const;
  double max_spacing() const;
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  // Tolerance (coordinate units) under which a point counts as sitting on a
  // cell center or a window edge.
  double snap_tol() const { return 1e-9 * min_spacing(); }

  double center(int axis, long j) const { return lo_[axis] + (static_cast<double>(j) + 0.5) * dx_[axis]; }
  void center(std::size_t flat, std::span<double> out) const;
  std::size_t flat_index(std::span<const long> idx) const;
  void unflatten(std::size_t flat, std::span<long> idx) const;

  // Flat index of the cell whose center is x (within snap_tol), if any.
  std::optional<std::size_t> center_index(std::span<const double> x) const;
  // x within the closed bounding box
  bool covers(std::span<const double> x, double tol = 0.0) const;

  // "256x128"
  std::string describe() const;

 private:
  Vec lo_, hi_, dx_;
  std::vector<int> cells_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

// Calls fn(flat, center) for every cell, in flat order.
template <class Fn>
void for_each_center(const GridSpec& grid, Fn&& fn) {
  const int d = grid.dimension();
  std::vector<long> idx(d, 0);
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = grid.center(i, 0);
  const std::size_t total = grid.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, std::span<const double>(x));
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < grid.cells(a)) {
        x[a] = grid.center(a, idx[a]);
        break;
      }
      idx[a] = 0;
      x[a] = grid.center(a, 0);
    }
  }
}

// Density samples at cell centers, optionally backed by analytic callbacks.
// Immutable; copies share the sample storage.
class GridField {
 public:
  GridField(GridSpec grid, std::vector<double> values, ScalarFn value_fn = {},
            GradientFn gradient_fn = {});

  static GridField sample(GridSpec grid, ScalarFn value_fn, GradientFn gradient_fn = {});
  static GridField zeros(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return *values_; }
  double operator[](std::size_t flat) const { return (*values_)[flat]; }

  bool has_value_fn() const { return static_cast<bool>(value_fn_); }
  bool has_gradient_fn() const { return static_cast<bool>(gradient_fn_); }
  const ScalarFn& value_fn() const { return value_fn_; }
  const GradientFn& gradient_fn() const { return gradient_fn_; }

  // Callback when present, otherwise the sample at the cell centered at x.
  double evaluate(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  // Same samples and value callback, different gradient callback.
  GridField with_gradient(GradientFn gradient_fn) const;

 private:
  GridSpec grid_;
  std::shared_ptr<const std::vector<double>> values_;
  ScalarFn value_fn_;
  GradientFn gradient_fn_;
};

// Linear combination a·f + b·g of fields on the same grid; callbacks are combined
// when both operands have them.
GridField combine(double a, const GridField& f, double b, const GridField& g);

}  // namespace chargelab
