#include "chargelab/charge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chargelab/optimize.hpp"

namespace chargelab {
namespace {

constexpr double kSupportTol = 1e-12;
constexpr double kTieTol = 1e-9;

// Open interval of the window y + (hK∩C) along `axis` for box K and orthant C.
std::pair<double, double> box_window_interval(const ConvexBody& body, const Cone& cone,
                                              std::span<const double> y, double h, int axis) {
  const double reach = h * (*body.axis_box_half_widths())[axis];
  const int m = cone.orthant_m().value_or(0);
  if (axis < m) return {y[axis], y[axis] + reach};
  return {y[axis] - reach, y[axis] + reach};
}

WindowSum direct_window(const Charge& nu, std::span<const double> y, const ConvexBody& body, double h) {
  const GridSpec& grid = nu.grid();
  const Cone& cone = nu.cone();
  const int d = grid.dimension();
  const Vec w = body.bounding_half_widths();
  const int m = cone.orthant_m().value_or(0);
  const double tol = grid.snap_tol();

  WindowSum out;
  std::vector<long> first(d), last(d);
  for (int i = 0; i < d; ++i) {
    const double lo = i < m ? y[i] : y[i] - h * w[i];
    const double hi = y[i] + h * w[i];
    if (lo < grid.lo(i) - tol || hi > grid.hi(i) + tol) out.clipped = true;
    first[i] = std::max(0L, static_cast<long>(std::floor((lo - grid.lo(i)) / grid.spacing(i) - 0.5)));
    last[i] = std::min<long>(grid.cells(i), static_cast<long>(std::ceil((hi - grid.lo(i)) / grid.spacing(i) - 0.5)) + 1);
    if (last[i] <= first[i]) return out;
  }
  const auto values = nu.density().values();
  std::vector<long> idx(first);
  Vec u(d);
  double total = 0.0;
  while (true) {
    for (int i = 0; i < d; ++i) u[i] = grid.center(i, idx[i]) - y[i];
    double wt = cone.quadrature_weight(u, tol);
    if (wt != 0.0) wt *= body.quadrature_weight(u, h, tol);
    if (wt != 0.0) total += wt * values[grid.flat_index(idx)];
    int a = d - 1;
    while (a >= 0 && ++idx[a] == last[a]) {
      idx[a] = first[a];
      --a;
    }
    if (a < 0) break;
  }
  out.value = total * grid.cell_volume();
  out.truncation_risk = out.clipped && nu.truncation_risk();
  return out;
}

// Window sums at every center for a general body and cone. On a uniform grid the
// window y + (hK∩C) is the same set of index offsets for every center y, so the
// weights are tabulated once and split into constant runs along the last axis;
// each run is then one difference of a line prefix sum.
std::vector<double> mask_window_sums(const Charge& nu, const ConvexBody& body, double h) {
  const GridSpec& grid = nu.grid();
  const Cone& cone = nu.cone();
  const int d = grid.dimension();
  const Vec w = body.bounding_half_widths();
  const double tol = grid.snap_tol();
  const int last = d - 1;

  std::vector<long> reach(d);
  for (int i = 0; i < d; ++i) reach[i] = static_cast<long>(std::ceil(h * w[i] / grid.spacing(i))) + 1;

  struct Run {
    std::vector<long> row;  // offsets on axes 0..d-2
    long first, end;        // offsets on the last axis, [first, end)
    double weight;
  };
  std::vector<Run> runs;
  std::vector<long> off(d);
  Vec u(d);
  for (int i = 0; i < last; ++i) off[i] = -reach[i];
  while (true) {
    for (int i = 0; i < last; ++i) u[i] = off[i] * grid.spacing(i);
    double current = 0.0;
    long start = 0;
    for (long k = -reach[last]; k <= reach[last] + 1; ++k) {
      double wt = 0.0;
      if (k <= reach[last]) {
        u[last] = k * grid.spacing(last);
        wt = cone.quadrature_weight(u, tol);
        if (wt != 0.0) wt *= body.quadrature_weight(u, h, tol);
      }
      if (wt != current) {
        if (current != 0.0) runs.push_back({std::vector<long>(off.begin(), off.begin() + last), start, k, current});
        current = wt;
        start = k;
      }
    }
    int a = last - 1;
    while (a >= 0 && ++off[a] > reach[a]) {
      off[a] = -reach[a];
      --a;
    }
    if (a < 0) break;
  }

  // prefix sums along the last axis, one line per index of the other axes
  const long n_last = grid.cells(last);
  const std::size_t lines = grid.size() / static_cast<std::size_t>(n_last);
  const auto values = nu.density().values();
  std::vector<double> prefix(lines * static_cast<std::size_t>(n_last + 1), 0.0);
  for (std::size_t l = 0; l < lines; ++l) {
    double acc = 0.0;
    double* p = &prefix[l * (n_last + 1)];
    for (long k = 0; k < n_last; ++k) {
      acc += values[l * n_last + k];
      p[k + 1] = acc;
    }
  }

  std::vector<double> sums(grid.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<long> idx(d);
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
    if (!cone.contains(x)) return;
    grid.unflatten(flat, idx);
    double total = 0.0;
    for (const Run& r : runs) {
      std::size_t line = 0;
      bool inside = true;
      for (int i = 0; i < last && inside; ++i) {
        const long j = idx[i] + r.row[i];
        inside = j >= 0 && j < grid.cells(i);
        line = line * static_cast<std::size_t>(grid.cells(i)) + static_cast<std::size_t>(j);
      }
      if (!inside) continue;
      const long lo = std::max(0L, idx[last] + r.first);
      const long hi = std::min(n_last, idx[last] + r.end);
      if (hi <= lo) continue;
      const double* p = &prefix[line * (n_last + 1)];
      total += r.weight * (p[hi] - p[lo]);
    }
    sums[flat] = total * grid.cell_volume();
  });
  return sums;
}

void check_body(const Charge& nu, const ConvexBody& body, double h) {
  if (body.dimension() != nu.grid().dimension()) {
    throw std::invalid_argument("body dimension does not match the charge");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("window scale h must be positive");
}

}  // namespace

Charge::Charge(GridField density, Cone cone, bool allow_truncation)
    : density_(std::move(density)), cone_(std::move(cone)) {
  const GridSpec& grid = density_.grid();
  const int d = grid.dimension();
  if (cone_.dimension() != d) throw std::invalid_argument("cone dimension does not match the grid");
  const int m = cone_.orthant_m().value_or(0);
  for (int i = 0; i < m; ++i) {
    if (std::abs(grid.lo(i)) > grid.snap_tol()) {
      throw std::invalid_argument("grid must start at 0 on the orthant axes of the cone");
    }
  }
  const auto values = density_.values();
  double sup = 0.0;
  std::vector<long> idx(d);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    sup = std::max(sup, std::abs(values[flat]));
    grid.unflatten(flat, idx);
    bool outer = false;
    for (int i = 0; i < d && !outer; ++i) {
      // the face x_i = 0 of an orthant axis is the boundary of C, not of the support
      outer = (idx[i] == 0 && i >= m) || idx[i] == grid.cells(i) - 1;
    }
    if (outer) boundary_max_ = std::max(boundary_max_, std::abs(values[flat]));
  }
  truncation_risk_ = boundary_max_ > kSupportTol * sup;
  if (truncation_risk_ && !allow_truncation) {
    throw std::invalid_argument("density does not vanish on the outer cell layer (max " +
                                std::to_string(boundary_max_) + "); enlarge the grid");
  }
  table_ = std::make_shared<const PrefixSumTable>(grid, values);
}

double Charge::measure_of_cells(std::span<const long> first, std::span<const long> last) const {
  return table_->box_sum(first, last) * grid().cell_volume();
}

double Charge::total() const {
  const int d = grid().dimension();
  std::vector<long> first(d, 0), last(d);
  for (int i = 0; i < d; ++i) last[i] = grid().cells(i);
  return measure_of_cells(first, last);
}

bool has_box_windows(const ConvexBody& body, const Cone& cone) {
  return body.is_axis_box() && cone.orthant_m().has_value();
}

WindowSum charge_of_window(const Charge& nu, std::span<const double> y, const ConvexBody& body, double h,
                           WindowPath path) {
  check_body(nu, body, h);
  if (y.size() != static_cast<std::size_t>(nu.grid().dimension())) {
    throw std::invalid_argument("window position has the wrong dimension");
  }
  const bool fast = has_box_windows(body, nu.cone());
  if (path == WindowPath::prefix_sum && !fast) {
    throw std::invalid_argument("prefix-sum windows need a box body and an orthant cone");
  }
  if (path == WindowPath::direct || !fast) return direct_window(nu, y, body, h);

  const GridSpec& grid = nu.grid();
  const int d = grid.dimension();
  std::vector<AxisTerms> axes(d);
  WindowSum out;
  for (int i = 0; i < d; ++i) {
    const auto [lo, hi] = box_window_interval(body, nu.cone(), y, h, i);
    axes[i] = axis_terms(grid, i, lo, hi);
    out.clipped = out.clipped || axes[i].clipped;
  }
  out.value = nu.prefix_table().weighted_sum(axes) * grid.cell_volume();
  out.truncation_risk = out.clipped && nu.truncation_risk();
  return out;
}

std::vector<double> window_sums_at_centers(const Charge& nu, const ConvexBody& body, double h,
                                           WindowPath path) {
  check_body(nu, body, h);
  const GridSpec& grid = nu.grid();
  const int d = grid.dimension();
  const bool fast = has_box_windows(body, nu.cone());
  if (path == WindowPath::prefix_sum && !fast) {
    throw std::invalid_argument("prefix-sum windows need a box body and an orthant cone");
  }
  if (fast && path != WindowPath::direct) {
    // orthant grids start at 0 on cone axes, so every center lies in C
    std::vector<std::vector<AxisTerms>> terms(d);
    Vec y(d, 0.0);
    for (int a = 0; a < d; ++a) {
      terms[a].resize(static_cast<std::size_t>(grid.cells(a)));
      for (long j = 0; j < grid.cells(a); ++j) {
        y[a] = grid.center(a, j);
        const auto [lo, hi] = box_window_interval(body, nu.cone(), y, h, a);
        terms[a][static_cast<std::size_t>(j)] = axis_terms(grid, a, lo, hi);
      }
    }
    auto sums = separable_window_sums(grid, nu.density().values(), terms);
    for (auto& s : sums) s *= grid.cell_volume();
    return sums;
  }
  if (path == WindowPath::direct) {
    std::vector<double> sums(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
      if (nu.cone().contains(x)) sums[flat] = direct_window(nu, x, body, h).value;
    });
    return sums;
  }
  return mask_window_sums(nu, body, h);
}

SupEstimate seminorm_Kh(const Charge& nu, const ConvexBody& body, double h) {
  const GridSpec& grid = nu.grid();
  const int d = grid.dimension();
  const auto sums = window_sums_at_centers(nu, body, h);
  SupEstimate out;
  out.value = -1.0;
  std::size_t best = 0;
  for (std::size_t flat = 0; flat < sums.size(); ++flat) {
    if (std::isnan(sums[flat])) continue;
    ++out.candidates;
    if (std::abs(sums[flat]) > out.value) {
      out.value = std::abs(sums[flat]);
      best = flat;
    }
  }
  out.argmax.assign(d, 0.0);
  if (out.candidates > 0) grid.center(best, out.argmax);
  const Vec origin(d, 0.0);
  if (grid.covers(origin, grid.snap_tol())) {
    ++out.candidates;
    const WindowSum w0 = charge_of_window(nu, origin, body, h);
    if (std::abs(w0.value) >= out.value) {
      out.value = std::abs(w0.value);
      out.argmax = origin;
    }
  }
  if (out.candidates == 0) throw std::domain_error("seminorm: empty candidate set");
  out.truncation_risk = nu.truncation_risk();
  return out;
}

SeminormK seminorm_K(const Charge& nu, const ConvexBody& body, double h_max, int refine_iters,
                     std::span<const double> extra_probes) {
  if (!(h_max > 0.0) || !std::isfinite(h_max)) throw std::invalid_argument("h_max must be positive");
  SeminormK out;
  auto probe = [&](double h) {
    const SupEstimate s = seminorm_Kh(nu, body, h);
    out.probes.emplace_back(h, s.value);
    return s;
  };

  constexpr int kScan = 32;
  std::vector<double> hs;
  const double h_min = h_max * 1e-3;
  for (int k = 0; k < kScan; ++k) hs.push_back(h_min * std::pow(h_max / h_min, static_cast<double>(k) / (kScan - 1)));
  for (double h : extra_probes)
    if (h > 0.0 && h <= h_max) hs.push_back(h);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

  std::vector<double> vals;
  for (double h : hs) vals.push_back(probe(h).value);
  const double coarse_best = *std::max_element(vals.begin(), vals.end());
  std::size_t k_best = 0;
  while (vals[k_best] < coarse_best - kTieTol * std::max(1.0, coarse_best)) ++k_best;

  if (refine_iters > 0 && hs.size() >= 2) {
    const double a = hs[k_best > 0 ? k_best - 1 : 0];
    const double b = hs[std::min(k_best + 1, hs.size() - 1)];
    golden_section_maximize([&](double h) { return probe(h).value; }, a, b, refine_iters);
  }

  double best = -1.0;
  for (const auto& [h, v] : out.probes) best = std::max(best, v);
  out.value = best;
  out.argmax_h = std::numeric_limits<double>::infinity();
  for (const auto& [h, v] : out.probes)
    if (v >= best - kTieTol * std::max(1.0, best)) out.argmax_h = std::min(out.argmax_h, h);
  out.argmax_y = seminorm_Kh(nu, body, out.argmax_h).argmax;
  out.degenerate = best == 0.0;
  return out;
}

GridField extremal_density(const ConvexBody& body, const Cone& cone, double h, const GridSpec& grid) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  if (body.dimension() != grid.dimension() || cone.dimension() != grid.dimension()) {
    throw std::invalid_argument("extremal density: dimension mismatch");
  }
  const Vec w = body.bounding_half_widths();
  const int m = cone.orthant_m().value_or(0);
  for (int i = 0; i < grid.dimension(); ++i) {
    const double lo_needed = i < m ? 0.0 : -h * w[i];
    if (grid.lo(i) > lo_needed + grid.snap_tol() || grid.hi(i) < h * w[i] - grid.snap_tol()) {
      throw std::invalid_argument("grid does not cover hK∩C");
    }
  }
  auto value = [body, cone, h](std::span<const double> x) {
    if (!cone.contains_closure(x)) return 0.0;
    return std::max(0.0, h - body.gauge(x));
  };
  auto gradient = [body, cone, h](std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (!cone.contains_closure(x)) return;
    const double g = body.gauge(x);
    if (!(g > 0.0) || !(g < h)) return;
    body.gauge_gradient(x, out);
    for (auto& v : out) v = -v;
  };
  return GridField::sample(grid, value, gradient);
}

GridSpec aligned_grid(const ConvexBody& body, const Cone& cone, double h, int n) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  const int k = n / 2 - std::max(2, n / 32);
  if (k < 1) throw std::invalid_argument("grid too coarse");
  Vec half = body.bounding_half_widths();
  for (auto& w : half) w = (n / 2) * (h * w / k);
  return GridSpec::symmetric(cone, half, n);
}

GradientSup grad_sup_polar(const GridField& f, const ConvexBody& body, const Cone& cone) {
  const GridSpec& grid = f.grid();
  const int d = grid.dimension();
  GradientSup out;
  out.argmax.assign(d, 0.0);
  Vec g(d);
  if (f.has_gradient_fn()) {
    for_each_center(grid, [&](std::size_t, std::span<const double> x) {
      if (!cone.contains(x)) return;
      f.gradient(x, g);
      const double v = body.polar_norm(g);
      if (v > out.value) {
        out.value = v;
        out.argmax.assign(x.begin(), x.end());
      }
    });
    return out;
  }
  out.finite_difference = true;
  const auto values = f.values();
  std::vector<long> idx(d);
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
    if (!cone.contains(x)) return;
    grid.unflatten(flat, idx);
    for (int i = 0; i < d; ++i) {
      const std::size_t s = grid.stride(i);
      const double dx = grid.spacing(i);
      if (idx[i] == 0) {
        g[i] = (values[flat + s] - values[flat]) / dx;
      } else if (idx[i] == grid.cells(i) - 1) {
        g[i] = (values[flat] - values[flat - s]) / dx;
      } else {
        g[i] = (values[flat + s] - values[flat - s]) / (2.0 * dx);
      }
    }
    const double v = body.polar_norm(g);
    if (v > out.value) {
      out.value = v;
      out.argmax.assign(x.begin(), x.end());
    }
  });
  return out;
}

SupEstimate sup_abs(const GridField& f, const Cone& cone) {
  const GridSpec& grid = f.grid();
  const int d = grid.dimension();
  SupEstimate out;
  out.argmax.assign(d, 0.0);
  const auto values = f.values();
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
    if (!cone.contains(x)) return;
    ++out.candidates;
    if (std::abs(values[flat]) > out.value) {
      out.value = std::abs(values[flat]);
      out.argmax.assign(x.begin(), x.end());
    }
  });
  const Vec origin(d, 0.0);
  if (f.has_value_fn() && grid.covers(origin, grid.snap_tol())) {
    ++out.candidates;
    const double v = std::abs(f.value_fn()(origin));
    if (v > out.value) {
      out.value = v;
      out.argmax = origin;
    }
  }
  return out;
}

double l1_norm(const GridField& f, const Cone& cone) {
  const GridSpec& grid = f.grid();
  const double tol = grid.snap_tol();
  const auto values = f.values();
  double total = 0.0;
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
    total += cone.quadrature_weight(x, tol) * std::abs(values[flat]);
  });
  return total * grid.cell_volume();
}

}  // namespace chargelab
