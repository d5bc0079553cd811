#include "chargelab/stechkin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chargelab/families.hpp"
#include "chargelab/optimize.hpp"

namespace chargelab {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

}  // namespace

ProblemSetting::ProblemSetting(Kind kind, int d, int m, double volume, double effective_volume, std::string label)
    : kind_(kind), d_(d), m_(m), volume_(volume), effective_volume_(effective_volume), label_(std::move(label)) {
  require_positive(volume_, "μ(K∩C)");
}

ProblemSetting ProblemSetting::charge(const ConvexBody& body, const Cone& cone) {
  const double v = volume_body_cone(body, cone);
  return ProblemSetting(Kind::charge, body.dimension(), cone.orthant_m().value_or(-1), v, v,
                        "charge " + body.describe() + " over " + cone.describe());
}

ProblemSetting ProblemSetting::mixed(int d, int m) {
  if (d < 1 || d > kMaxDimension || m < 0 || m > d) throw std::invalid_argument("mixed setting needs 0 <= m <= d <= 6");
  return ProblemSetting(Kind::mixed, d, m, std::ldexp(1.0, d - m), std::ldexp(1.0, -m),
                        "mixed d=" + std::to_string(d) + " m=" + std::to_string(m));
}

std::string ProblemSetting::describe() const { return label_; }

double omega(const ProblemSetting& s, double delta) {
  require_positive(delta, "δ");
  const int d = s.dimension();
  return std::pow((d + 1.0) * delta / s.effective_volume(), 1.0 / (d + 1.0));
}

double stechkin_error(const ProblemSetting& s, double N) {
  require_positive(N, "N");
  const int d = s.dimension();
  return d / (d + 1.0) * std::pow(1.0 / (N * s.effective_volume()), 1.0 / d);
}

double operator_norm(const ProblemSetting& s, double h) {
  require_positive(h, "h");
  return 1.0 / (std::pow(h, s.dimension()) * s.effective_volume());
}

double optimal_h_for_delta(const ProblemSetting& s, double delta) { return omega(s, delta); }

double optimal_h_for_N(const ProblemSetting& s, double N) {
  require_positive(N, "N");
  return std::pow(1.0 / (N * s.effective_volume()), 1.0 / s.dimension());
}

double additive_bound(const ProblemSetting& s, double h, double delta) {
  require_positive(h, "h");
  const int d = s.dimension();
  return d * h / (d + 1.0) + delta * operator_norm(s, h);
}

std::vector<double> log_space(double lo, double hi, int count) {
  require_positive(lo, "lower end");
  require_positive(hi, "upper end");
  if (count < 1) throw std::invalid_argument("need at least one point");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  return out;
}

std::vector<SandwichRow> sandwich_check(const ProblemSetting& s, std::span<const double> deltas) {
  std::vector<SandwichRow> rows;
  for (double delta : deltas) {
    require_positive(delta, "δ");
    auto objective = [&](double logN) {
      const double N = std::exp(logN);
      return stechkin_error(s, N) + N * delta;
    };
    double lo = 1e-3 / s.effective_volume();
    double hi = 1e3 / s.effective_volume();
    std::vector<double> grid;
    std::size_t best = 0;
    for (int widen = 0; widen < 20; ++widen) {
      grid = log_space(lo, hi, 64);
      best = 0;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (objective(std::log(grid[i])) < objective(std::log(grid[best]))) best = i;
      if (best == 0) {
        lo *= 1e-3;
      } else if (best + 1 == grid.size()) {
        hi *= 1e3;
      } else {
        break;
      }
    }
    const double a = std::log(grid[best == 0 ? 0 : best - 1]);
    const double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    const ScalarOptimum opt = golden_section_minimize(objective, a, b, 200, 1e-14);
    SandwichRow row;
    row.delta = delta;
    row.omega = omega(s, delta);
    row.inf_value = opt.value;
    row.argmin_N = std::exp(opt.x);
    row.relative_gap = std::abs(row.inf_value - row.omega) / row.omega;
    row.ok = row.relative_gap <= 1e-6;
    rows.push_back(row);
  }
  return rows;
}

std::vector<StechkinCurvePoint> stechkin_curve(const ProblemSetting& s, std::span<const double> Ns) {
  std::vector<StechkinCurvePoint> out;
  out.reserve(Ns.size());
  for (double N : Ns) out.push_back({N, stechkin_error(s, N), optimal_h_for_N(s, N)});
  return out;
}

// ---------------------------------------------------------------------------

RecoveryResult recover_derivative(const Charge& noisy, double delta, const ConvexBody& body) {
  require_positive(delta, "δ");
  const ProblemSetting setting = ProblemSetting::charge(body, noisy.cone());
  const double h = optimal_h_for_delta(setting, delta);
  const SteklovParams params(body, noisy.cone(), h, setting.volume());
  RecoveryResult r{steklov_field(noisy, params), std::nullopt, h, omega(setting, delta),
                   additive_bound(setting, h, delta), {}};
  const Vec origin(noisy.grid().dimension(), 0.0);
  if (noisy.grid().covers(origin, noisy.grid().snap_tol())) r.estimate_at_origin = steklov_apply(noisy, params, origin);
  if (noisy.truncation_risk()) r.warnings.push_back("window truncation risk");
  return r;
}

RecoveryResult recover_mixed(const GridField& noisy, double delta, int m) {
  require_positive(delta, "δ");
  const GridSpec& grid = noisy.grid();
  const int d = grid.dimension();
  const ProblemSetting setting = ProblemSetting::mixed(d, m);
  const double h_opt = optimal_h_for_delta(setting, delta);
  std::vector<std::string> warnings;
  double h = h_opt;
  try {
    for (int i = 0; i < d; ++i) commensurate_steps(grid, i, h);
  } catch (const std::invalid_argument&) {
    const double dx = grid.spacing(0);
    h = std::max(1.0, std::round(h_opt / dx)) * dx;
    for (int i = 0; i < d; ++i) commensurate_steps(grid, i, h);  // throws for unequal spacings
    std::ostringstream os;
    os.precision(17);
    os << "optimal step " << h_opt << " snapped to " << h;
    warnings.push_back(os.str());
  }
  const MixedParams p(d, m, h);
  RecoveryResult r{mixed_operator_field(noisy, p), std::nullopt, h, omega(setting, delta),
                   additive_bound(setting, h, delta), std::move(warnings)};
  const Vec origin(d, 0.0);
  if (noisy.has_value_fn() && grid.covers(origin, grid.snap_tol())) {
    r.estimate_at_origin = mixed_operator_apply(noisy, p, origin);
  }
  return r;
}

RecoveryError recovery_error(const RecoveryResult& r, const GridField& truth, const Cone& cone) {
  const GridSpec& grid = r.estimate.grid;
  if (truth.grid().size() != grid.size()) throw std::invalid_argument("truth and estimate grids differ");
  RecoveryError out;
  out.argmax.assign(grid.dimension(), 0.0);
  std::size_t in_cone = 0;
  std::size_t valid = 0;
  for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
    if (!cone.contains(x)) return;
    ++in_cone;
    if (!r.estimate.valid[flat]) return;
    ++valid;
    const double e = std::abs(truth[flat] - r.estimate.values[flat]);
    if (e > out.value) {
      out.value = e;
      out.argmax.assign(x.begin(), x.end());
    }
  });
  if (r.estimate_at_origin && truth.has_value_fn()) {
    const Vec origin(grid.dimension(), 0.0);
    const double e = std::abs(truth.value_fn()(origin) - *r.estimate_at_origin);
    if (e > out.value) {
      out.value = e;
      out.argmax = origin;
    }
  }
  out.coverage = in_cone ? static_cast<double>(valid) / static_cast<double>(in_cone) : 0.0;
  return out;
}

namespace {

double corner_h_max(const ConvexBody& body, const GridSpec& grid) {
  const int d = grid.dimension();
  Vec corner(d);
  double g = 0.0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    for (int i = 0; i < d; ++i) corner[i] = (mask >> i) & 1u ? grid.hi(i) : grid.lo(i);
    g = std::max(g, body.gauge(corner));
  }
  return 2.0 * g;
}

void fill_demo(RecoveryDemo& demo, RecoveryResult r, const GridField& truth, const Cone& cone) {
  const RecoveryError err = recovery_error(r, truth, cone);
  demo.h = r.h;
  demo.omega = r.omega;
  demo.error = err.value;
  demo.coverage = err.coverage;
  demo.warnings.insert(demo.warnings.end(), r.warnings.begin(), r.warnings.end());
  demo.result = std::move(r);
}

}  // namespace

RecoveryDemo worst_case_recovery(const ConvexBody& body, const Cone& cone, double delta, int n) {
  const ProblemSetting setting = ProblemSetting::charge(body, cone);
  const double h = optimal_h_for_delta(setting, delta);
  const GridSpec grid = aligned_grid(body, cone, h, n);
  const GridField truth = extremal_density(body, cone, h, grid);
  const Charge nu(truth, cone);
  const double norm = seminorm_K(nu, body, corner_h_max(body, grid), 40).value;
  const Charge noisy(combine(1.0, truth, -delta / norm, truth), cone, true);

  RecoveryDemo demo;
  demo.kind = "worst-case";
  demo.delta = delta;
  demo.grid = grid.describe();
  demo.perturbation_norm = delta;
  fill_demo(demo, recover_derivative(noisy, delta, body), truth, cone);
  return demo;
}

RecoveryDemo typical_recovery(const ConvexBody& body, const Cone& cone, double delta, int n, std::uint64_t seed) {
  const int d = body.dimension();
  constexpr double kExtent = 3.5;  // grid half width, in units of K's bounding box
  constexpr double kWidth = 0.5;
  Vec half = body.bounding_half_widths();
  for (auto& w : half) w *= kExtent;
  const GridSpec grid = GridSpec::symmetric(cone, half, n);
  const Vec center(d, 0.0);

  const GridField unit = gaussian_density(grid, center, kWidth, 1.0);
  const double g = grad_sup_polar(unit, body, cone).value;
  const GridField truth = gaussian_density(grid, center, kWidth, 0.5 / g);

  const GridField raw = filtered_noise_density(grid, seed, 0.4 * kExtent);
  const Charge raw_charge(raw, cone, true);
  const double h_max = corner_h_max(body, grid);
  const double raw_norm = seminorm_K(raw_charge, body, h_max, 40).value;
  if (!(raw_norm > 0.0)) throw std::runtime_error("noise realization has zero norm");
  const GridField noise = combine(delta / raw_norm, raw, 0.0, raw);
  const Charge noisy(combine(1.0, truth, 1.0, noise), cone, true);

  RecoveryDemo demo;
  demo.kind = "typical";
  demo.delta = delta;
  demo.grid = grid.describe();
  demo.perturbation_norm = seminorm_K(Charge(noise, cone, true), body, h_max, 40).value;
  fill_demo(demo, recover_derivative(noisy, delta, body), truth, cone);
  return demo;
}

RecoveryDemo worst_case_mixed_recovery(int d, int m, double delta, int n) {
  if (m < 0 || m > 1) throw std::invalid_argument("worst-case mixed inputs exist for m = 0 and m = 1");
  if (n < 8 || n % 4 != 0) throw std::invalid_argument("grid must be a multiple of 4");
  const ProblemSetting setting = ProblemSetting::mixed(d, m);
  const double h = optimal_h_for_delta(setting, delta);
  Vec lo(d), hi(d);
  std::vector<int> cells(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = i < m ? 0.0 : -2.0 * h;
    hi[i] = 2.0 * h;
    cells[i] = i < m ? n / 2 : n;
  }
  const GridSpec grid(lo, hi, cells);
  const Cone cone = Cone::orthant(d, m);
  const MixedFunction f = m == 0 ? extremal_mixed_m0(h, d) : extremal_mixed_m1(h, d);
  const GridField value = sample_value(f, grid);
  const double sup_f = sup_abs(value, cone).value;
  const GridField noisy = combine(1.0, value, -delta / sup_f, value);

  RecoveryDemo demo;
  demo.kind = "worst-case";
  demo.delta = delta;
  demo.grid = grid.describe();
  demo.perturbation_norm = delta;
  fill_demo(demo, recover_mixed(noisy, delta, m), sample_mixed(f, grid), cone);
  return demo;
}

RecoveryDemo typical_mixed_recovery(int d, int m, double delta, int n, std::uint64_t seed) {
  constexpr double kExtent = 3.0;
  Vec lo(d), hi(d);
  std::vector<int> cells(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = i < m ? 0.0 : -kExtent;
    hi[i] = kExtent;
    cells[i] = i < m ? n / 2 : n;
  }
  const GridSpec grid(lo, hi, cells);
  const Cone cone = Cone::orthant(d, m);
  const Vec center(d, 0.0);
  const MixedFunction unit = gaussian_product(center, 0.5, 1.0);
  const double g = grad_sup_polar(sample_mixed(unit, grid), ConvexBody::box(d), cone).value;
  const MixedFunction f = gaussian_product(center, 0.5, 0.5 / g);

  const GridField noise = filtered_noise_density(grid, seed, 0.8 * kExtent);
  const GridField noisy = combine(1.0, sample_value(f, grid), delta, noise);

  RecoveryDemo demo;
  demo.kind = "typical";
  demo.delta = delta;
  demo.grid = grid.describe();
  demo.perturbation_norm = delta * sup_abs(noise, Cone::orthant(d, 0)).value;
  fill_demo(demo, recover_mixed(noisy, delta, m), sample_mixed(f, grid), cone);
  return demo;
}

}  // namespace chargelab
