#include "chargelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chargelab {

GridSpec::GridSpec(Vec lo, Vec hi, std::vector<int> cells)
    : lo_(std::move(lo)), hi_(std::move(hi)), cells_(std::move(cells)) {
  const std::size_t d = lo_.size();
  if (d < 1 || d > static_cast<std::size_t>(kMaxDimension) || hi_.size() != d || cells_.size() != d) {
    throw std::invalid_argument("grid bounds/resolution must have one entry per axis, 1 <= d <= 6");
  }
  dx_.resize(d);
  strides_.assign(d, 1);
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || !(hi_[i] > lo_[i])) {
      throw std::invalid_argument("grid axis needs finite bounds with hi > lo");
    }
    if (cells_[i] < 2) throw std::invalid_argument("grid axis needs at least 2 cells");
    dx_[i] = (hi_[i] - lo_[i]) / cells_[i];
    cell_volume_ *= dx_[i];
  }
  for (std::size_t i = d; i-- > 0;) {
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(cells_[i]);
  }
}

GridSpec GridSpec::symmetric(const Cone& cone, std::span<const double> half_widths, int n) {
  const int d = cone.dimension();
  if (static_cast<int>(half_widths.size()) != d) throw std::invalid_argument("half width per axis required");
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("symmetric grid needs an even n >= 4");
  const int m = cone.orthant_m().value_or(0);
  Vec lo(d), hi(d);
  std::vector<int> cells(d);
  for (int i = 0; i < d; ++i) {
    hi[i] = half_widths[i];
    lo[i] = i < m ? 0.0 : -half_widths[i];
    cells[i] = i < m ? n / 2 : n;
  }
  return GridSpec(std::move(lo), std::move(hi), std::move(cells));
}

double GridSpec::min_spacing() const { return *std::min_element(dx_.begin(), dx_.end()); }
double GridSpec::max_spacing() const { return *std::max_element(dx_.begin(), dx_.end()); }

void GridSpec::center(std::size_t flat, std::span<double> out) const {
  for (int i = 0; i < dimension(); ++i) {
    const long j = static_cast<long>(flat / strides_[i]);
    flat -= static_cast<std::size_t>(j) * strides_[i];
    out[i] = center(i, j);
  }
}

std::size_t GridSpec::flat_index(std::span<const long> idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < dimension(); ++i) flat += static_cast<std::size_t>(idx[i]) * strides_[i];
  return flat;
}

void GridSpec::unflatten(std::size_t flat, std::span<long> idx) const {
  for (int i = 0; i < dimension(); ++i) {
    idx[i] = static_cast<long>(flat / strides_[i]);
    flat -= static_cast<std::size_t>(idx[i]) * strides_[i];
  }
}

std::optional<std::size_t> GridSpec::center_index(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension()) return std::nullopt;
  std::size_t flat = 0;
  for (int i = 0; i < dimension(); ++i) {
    const double t = (x[i] - lo_[i]) / dx_[i] - 0.5;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9 || r < 0 || r >= cells_[i]) return std::nullopt;
    flat += static_cast<std::size_t>(r) * strides_[i];
  }
  return flat;
}

bool GridSpec::covers(std::span<const double> x, double tol) const {
  for (int i = 0; i < dimension(); ++i)
    if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
  return true;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  for (int i = 0; i < dimension(); ++i) os << (i ? "x" : "") << cells_[i];
  return os.str();
}

GridField::GridField(GridSpec grid, std::vector<double> values, ScalarFn value_fn,
                     GradientFn gradient_fn)
    : grid_(std::move(grid)),
      values_(std::make_shared<const std::vector<double>>(std::move(values))),
      value_fn_(std::move(value_fn)),
      gradient_fn_(std::move(gradient_fn)) {
  if (values_->size() != grid_.size()) {
    throw std::invalid_argument("field has " + std::to_string(values_->size()) + " samples, grid has " +
                                std::to_string(grid_.size()) + " cells");
  }
  for (double v : *values_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite field sample");
}

GridField GridField::sample(GridSpec grid, ScalarFn value_fn, GradientFn gradient_fn) {
  if (!value_fn) throw std::invalid_argument("sample needs a value callback");
  std::vector<double> values(grid.size());
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) { values[flat] = value_fn(x); });
  return GridField(std::move(grid), std::move(values), std::move(value_fn), std::move(gradient_fn));
}

GridField GridField::zeros(GridSpec grid) {
  const int d = grid.dimension();
  std::vector<double> values(grid.size(), 0.0);
  return GridField(std::move(grid), std::move(values), [](std::span<const double>) { return 0.0; },
                   [d](std::span<const double>, std::span<double> out) {
                     std::fill(out.begin(), out.begin() + d, 0.0);
                   });
}

double GridField::evaluate(std::span<const double> x) const {
  if (value_fn_) return value_fn_(x);
  if (auto flat = grid_.center_index(x)) return (*values_)[*flat];
  throw std::invalid_argument("field has no value callback and the point is not a cell center");
}

void GridField::gradient(std::span<const double> x, std::span<double> out) const {
  if (!gradient_fn_) throw std::logic_error("field has no gradient callback");
  gradient_fn_(x, out);
}

GridField GridField::with_gradient(GradientFn gradient_fn) const {
  GridField out = *this;
  out.gradient_fn_ = std::move(gradient_fn);
  return out;
}

GridField combine(double a, const GridField& f, double b, const GridField& g) {
  if (f.grid().size() != g.grid().size() || f.grid().dimension() != g.grid().dimension()) {
    throw std::invalid_argument("combine needs fields on the same grid");
  }
  std::vector<double> values(f.grid().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = a * f[i] + b * g[i];
  ScalarFn vf;
  GradientFn gf;
  if (f.has_value_fn() && g.has_value_fn()) {
    vf = [a, b, fv = f.value_fn(), gv = g.value_fn()](std::span<const double> x) {
      return a * fv(x) + b * gv(x);
    };
  }
  if (f.has_gradient_fn() && g.has_gradient_fn()) {
    gf = [a, b, fg = f.gradient_fn(), gg = g.gradient_fn()](std::span<const double> x, std::span<double> out) {
      Vec tmp(out.size());
      fg(x, out);
      gg(x, tmp);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * out[i] + b * tmp[i];
    };
  }
  return GridField(f.grid(), std::move(values), std::move(vf), std::move(gf));
}

}  // namespace chargelab
