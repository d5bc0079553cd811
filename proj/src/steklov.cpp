#include "chargelab/steklov.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chargelab {
namespace {

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive and finite");
}

}  // namespace

SteklovParams SteklovParams::make(ConvexBody body, Cone cone, double h) {
  const double volume = volume_body_cone(body, cone);
  return SteklovParams(std::move(body), std::move(cone), h, volume);
}

SteklovParams::SteklovParams(ConvexBody body_, Cone cone_, double h_, double volume_)
    : body(std::move(body_)), cone(std::move(cone_)), h(h_), volume(volume_) {
  check_h(h);
  if (body.dimension() != cone.dimension()) throw std::invalid_argument("body and cone dimensions differ");
  if (!(volume > 0.0) || !std::isfinite(volume)) throw std::invalid_argument("μ(K∩C) must be positive");
}

double steklov_norm(const SteklovParams& p) {
  return 1.0 / (std::pow(p.h, p.body.dimension()) * p.volume);
}

double steklov_apply(const Charge& nu, const SteklovParams& p, std::span<const double> x) {
  return charge_of_window(nu, x, p.body, p.h).value * steklov_norm(p);
}

MaskedField::MaskedField(const GridField& f)
    : grid(f.grid()), values(f.values().begin(), f.values().end()), valid(f.grid().size(), 1) {}

MaskedField::MaskedField(GridSpec grid_, std::vector<double> values_, std::vector<std::uint8_t> valid_)
    : grid(std::move(grid_)), values(std::move(values_)), valid(std::move(valid_)) {
  if (values.size() != grid.size() || valid.size() != grid.size()) {
    throw std::invalid_argument("masked field size mismatch");
  }
}

std::size_t MaskedField::valid_count() const {
  std::size_t n = 0;
  for (auto v : valid) n += v ? 1 : 0;
  return n;
}

MaskedField steklov_field(const Charge& nu, const SteklovParams& p) {
  auto sums = window_sums_at_centers(nu, p.body, p.h);
  const double scale = steklov_norm(p);
  std::vector<std::uint8_t> valid(sums.size(), 1);
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (std::isnan(sums[i])) {
      valid[i] = 0;
      sums[i] = 0.0;
    } else {
      sums[i] *= scale;
    }
  }
  return MaskedField(nu.grid(), std::move(sums), std::move(valid));
}

DeviationSup deviation_sup(const Charge& nu, const SteklovParams& p) {
  const GridSpec& grid = nu.grid();
  const int d = grid.dimension();
  const MaskedField s = steklov_field(nu, p);
  const auto density = nu.density().values();
  const Vec reach = p.body.bounding_half_widths();
  const int m = p.cone.orthant_m().value_or(0);
  const double tol = grid.snap_tol();

  DeviationSup out;
  out.argmax.assign(d, 0.0);
  std::size_t inside = 0;
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
    if (!s.valid[flat]) return;
    ++out.candidates;
    // a clipped window loses nothing when the density vanishes past the grid
    bool fits = true;
    for (int i = 0; i < d && fits && nu.truncation_risk(); ++i) {
      const double lo = i < m ? x[i] : x[i] - p.h * reach[i];
      fits = lo >= grid.lo(i) - tol && x[i] + p.h * reach[i] <= grid.hi(i) + tol;
    }
    if (fits) ++inside;
    const double dev = std::abs(density[flat] - s.values[flat]);
    if (dev > out.value) {
      out.value = dev;
      out.argmax.assign(x.begin(), x.end());
    }
  });
  const Vec origin(d, 0.0);
  if (nu.density().has_value_fn() && grid.covers(origin, tol)) {
    ++out.candidates;
    const WindowSum w = charge_of_window(nu, origin, p.body, p.h);
    if (!w.truncation_risk) ++inside;
    const double dev = std::abs(nu.density().value_fn()(origin) - w.value * steklov_norm(p));
    if (dev > out.value) {
      out.value = dev;
      out.argmax = origin;
    }
  }
  out.coverage = out.candidates ? static_cast<double>(inside) / static_cast<double>(out.candidates) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

MixedParams::MixedParams(int d_, int m_, double h_) : d(d_), m(m_), h(h_) {
  if (d < 1 || d > kMaxDimension) throw std::invalid_argument("mixed setting needs 1 <= d <= 6");
  if (m < 0 || m > d) throw std::invalid_argument("mixed setting needs 0 <= m <= d");
  check_h(h);
}

long commensurate_steps(const GridSpec& grid, int axis, double h) {
  check_h(h);
  const double dx = grid.spacing(axis);
  const double k = h / dx;
  const double r = std::round(k);
  if (r >= 1.0 && std::abs(k - r) <= 1e-9 * std::max(1.0, k)) return static_cast<long>(r);
  std::ostringstream os;
  os.precision(17);
  os << "h = " << h << " is not a multiple of the spacing " << dx << " on axis " << axis
     << "; admissible values nearby: ";
  const double lo = std::max(1.0, std::floor(k));
  os << lo * dx << ", " << (lo + 1.0) * dx;
  throw std::invalid_argument(os.str());
}

namespace {

MaskedField shifted_difference(const MaskedField& f, int axis, long forward, long backward) {
  const GridSpec& grid = f.grid;
  const long n = grid.cells(axis);
  const std::size_t s = grid.stride(axis);
  std::vector<double> values(f.values.size(), 0.0);
  std::vector<std::uint8_t> valid(f.values.size(), 0);
  std::vector<long> idx(grid.dimension());
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    grid.unflatten(flat, idx);
    const long j = idx[axis];
    if (j + forward >= n || j - backward < 0) continue;
    const std::size_t up = flat + static_cast<std::size_t>(forward) * s;
    const std::size_t down = flat - static_cast<std::size_t>(backward) * s;
    if (!f.valid[up] || !f.valid[down]) continue;
    values[flat] = f.values[up] - f.values[down];
    valid[flat] = 1;
  }
  return MaskedField(grid, std::move(values), std::move(valid));
}

}  // namespace

MaskedField diff_forward(const MaskedField& f, int axis, double h) {
  const long k = commensurate_steps(f.grid, axis, h);
  return shifted_difference(f, axis, k, 0);
}

MaskedField diff_central(const MaskedField& f, int axis, double h) {
  const long k = commensurate_steps(f.grid, axis, h);
  return shifted_difference(f, axis, k, k);
}

double mixed_operator_norm(const MixedParams& p) { return std::pow(2.0, p.m) / std::pow(p.h, p.d); }

double mixed_operator_apply(const GridField& f, const MixedParams& p, std::span<const double> x) {
  const GridSpec& grid = f.grid();
  if (grid.dimension() != p.d || static_cast<int>(x.size()) != p.d) {
    throw std::invalid_argument("mixed operator: dimension mismatch");
  }
  const bool x_on_center = grid.center_index(x).has_value();
  Vec node(p.d);
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << p.d); ++mask) {
    double sign = 1.0;
    for (int i = 0; i < p.d; ++i) {
      const bool up = (mask >> i) & 1u;
      if (i < p.m) {
        node[i] = x[i] + (up ? p.h : 0.0);
      } else {
        node[i] = x[i] + (up ? p.h : -p.h);
      }
      if (!up) sign = -sign;
    }
    std::optional<std::size_t> flat;
    if (x_on_center) flat = grid.center_index(node);
    double v;
    if (flat) {
      v = f[*flat];
    } else if (f.has_value_fn()) {
      v = f.value_fn()(node);
    } else {
      throw std::invalid_argument("stencil node is off the grid and the field has no value callback");
    }
    total += sign * v;
  }
  return total / (std::pow(2.0, p.d - p.m) * std::pow(p.h, p.d));
}

MaskedField mixed_operator_field(const GridField& f, const MixedParams& p) {
  if (f.grid().dimension() != p.d) throw std::invalid_argument("mixed operator: dimension mismatch");
  MaskedField out(f);
  for (int axis = p.d - 1; axis >= 0; --axis) {
    out = axis < p.m ? diff_forward(out, axis, p.h) : diff_central(out, axis, p.h);
  }
  const double scale = 1.0 / (std::pow(2.0, p.d - p.m) * std::pow(p.h, p.d));
  for (auto& v : out.values) v *= scale;
  return out;
}

FubiniResidual fubini_identity_check(const MixedFunction& f, const GridSpec& grid, const MixedParams& p,
                                     std::span<const double> x) {
  if (!f.value || !f.mixed) throw std::invalid_argument("fubini check needs f and its mixed derivative");
  if (grid.dimension() != p.d) throw std::invalid_argument("fubini check: dimension mismatch");
  const int d = p.d;
  const double tol = grid.snap_tol();
  // per-axis cell weights of the window x + hK∩C
  std::vector<long> first(d), last(d);
  std::vector<std::vector<double>> weights(d);
  for (int i = 0; i < d; ++i) {
    const double lo = i < p.m ? x[i] : x[i] - p.h;
    const double hi = x[i] + p.h;
    if (lo < grid.lo(i) - tol || hi > grid.hi(i) + tol) {
      throw std::invalid_argument("fubini check: window leaves the grid");
    }
    first[i] = std::max(0L, static_cast<long>(std::floor((lo - grid.lo(i)) / grid.spacing(i))) - 1);
    last[i] = std::min<long>(grid.cells(i), static_cast<long>(std::ceil((hi - grid.lo(i)) / grid.spacing(i))) + 1);
    for (long j = first[i]; j < last[i]; ++j) {
      const double c = grid.center(i, j);
      weights[i].push_back(edge_weight(std::min(c - lo, hi - c), tol));
    }
  }
  std::vector<long> idx(first);
  Vec u(d);
  double integral = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d && w != 0.0; ++i) w *= weights[i][static_cast<std::size_t>(idx[i] - first[i])];
    if (w != 0.0) {
      for (int i = 0; i < d; ++i) u[i] = grid.center(i, idx[i]);
      integral += w * f.mixed(u);
    }
    int a = d - 1;
    while (a >= 0 && ++idx[a] == last[a]) {
      idx[a] = first[a];
      --a;
    }
    if (a < 0) break;
  }
  integral *= grid.cell_volume();

  const GridField shell(grid, std::vector<double>(grid.size(), 0.0), f.value);
  const double diffs = mixed_operator_apply(shell, p, x) * std::pow(2.0, d - p.m) * std::pow(p.h, d);
  return {integral, diffs, std::abs(integral - diffs)};
}

}  // namespace chargelab
