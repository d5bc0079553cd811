#include "chargelab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chargelab/families.hpp"
#include "chargelab/optimize.hpp"
#include "chargelab/rng.hpp"

namespace chargelab {

bool InequalityReport::chain_ordered() const {
  if (std::isnan(chain)) return true;
  return lhs <= chain + tolerance && chain <= rhs + tolerance;
}

bool InequalityReport::passed() const { return failures().empty(); }

std::vector<std::string> InequalityReport::failures() const {
  std::vector<std::string> out;
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) out.push_back("non-finite");
  if (slack < -tolerance) out.push_back("negative-slack");
  if (!chain_ordered()) out.push_back("chain-order");
  if (expect_equality && !equality) out.push_back("equality");
  return out;
}

double report_tolerance(const GridSpec& grid, bool expect_equality) {
  return expect_equality ? std::max(1e-3, 2.0 * grid.max_spacing()) : 1e-6;
}

namespace {

void finish(InequalityReport& r, const GridSpec& grid, bool expect_equality) {
  r.rhs = 0.0;
  for (const auto& t : r.rhs_terms) r.rhs += t.value;
  r.slack = r.rhs - r.lhs;
  r.expect_equality = expect_equality;
  r.tolerance = report_tolerance(grid, expect_equality);
  r.equality = std::abs(r.slack) <= r.tolerance;
  r.grid = grid.describe();
}

void finish_chain(InequalityReport& r) {
  r.chain = 0.0;
  for (const auto& t : r.chain_terms) r.chain += t.value;
}

double default_h_max(const ConvexBody& body, const GridSpec& grid) {
  const int d = grid.dimension();
  Vec corner(d);
  double g = 0.0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    for (int i = 0; i < d; ++i) corner[i] = (mask >> i) & 1u ? grid.hi(i) : grid.lo(i);
    g = std::max(g, body.gauge(corner));
  }
  return 2.0 * g;
}

void charge_warnings(InequalityReport& r, const Charge& nu, const GradientSup& grad, bool truncation) {
  if (grad.finite_difference) r.warnings.push_back("gradient by finite differences");
  if (truncation || nu.truncation_risk()) r.warnings.push_back("window truncation risk");
}

}  // namespace

double optimal_h_charge(int d, double volume, double gradient_sup, double seminorm) {
  if (!(gradient_sup > 0.0) || !(seminorm > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::pow((d + 1.0) * seminorm / (volume * gradient_sup), 1.0 / (d + 1.0));
}

InequalityReport lk_additive_charge(const Charge& nu, const ConvexBody& body, double h, const CheckOptions& opts) {
  const Cone& cone = nu.cone();
  const GridSpec& grid = nu.grid();
  const int d = grid.dimension();
  const SteklovParams params = SteklovParams::make(body, cone, h);

  const SupEstimate sup = sup_abs(nu.density(), cone);
  const GradientSup grad = grad_sup_polar(nu.density(), body, cone);
  const SupEstimate semi = seminorm_Kh(nu, body, h);
  const DeviationSup dev = deviation_sup(nu, params);
  const double norm = steklov_norm(params);

  InequalityReport r;
  r.case_id = opts.case_id;
  r.kind = "additive-charge";
  r.d = d;
  r.m = cone.orthant_m().value_or(-1);
  r.h = h;
  r.lhs = sup.value;
  r.rhs_terms = {{"deviation", d * h / (d + 1.0) * grad.value}, {"norm", semi.value * norm}};
  r.chain_terms = {{"deviation", dev.value}, {"norm", norm * semi.value}};
  finish_chain(r);
  r.argmax = {{"lhs", sup.argmax}, {"gradient", grad.argmax}, {"window", semi.argmax}, {"deviation", dev.argmax}};
  r.coverage = dev.coverage;
  charge_warnings(r, nu, grad, semi.truncation_risk);
  finish(r, grid, opts.expect_equality);
  return r;
}

InequalityReport lk_multiplicative_charge(const Charge& nu, const ConvexBody& body, const CheckOptions& opts) {
  const Cone& cone = nu.cone();
  const GridSpec& grid = nu.grid();
  const int d = grid.dimension();
  const double volume = volume_body_cone(body, cone);
  const double h_max = opts.h_max > 0.0 ? opts.h_max : default_h_max(body, grid);

  const SupEstimate sup = sup_abs(nu.density(), cone);
  const GradientSup grad = grad_sup_polar(nu.density(), body, cone);
  const SeminormK semi = seminorm_K(nu, body, h_max, opts.refine_iters);

  InequalityReport r;
  r.case_id = opts.case_id;
  r.kind = "multiplicative-charge";
  r.d = d;
  r.m = cone.orthant_m().value_or(-1);
  r.lhs = sup.value;
  const double e = 1.0 / (d + 1.0);
  r.rhs_terms = {{"bound", std::pow((d + 1.0) / volume, e) * std::pow(grad.value, d * e) * std::pow(semi.value, e)}};
  const double h_opt = optimal_h_charge(d, volume, grad.value, semi.value);
  if (std::isfinite(h_opt)) {
    r.h = h_opt;
    r.chain_terms = {{"deviation", d * h_opt / (d + 1.0) * grad.value},
                     {"norm", semi.value / (std::pow(h_opt, d) * volume)}};
    finish_chain(r);
  }
  r.argmax = {{"lhs", sup.argmax}, {"gradient", grad.argmax}, {"window", semi.argmax_y}};
  charge_warnings(r, nu, grad, false);
  if (semi.degenerate) r.warnings.push_back("zero charge: maximizing h is arbitrary");
  if (semi.argmax_h >= h_max * (1.0 - 1e-9)) r.warnings.push_back("seminorm attained at h_max");
  finish(r, grid, opts.expect_equality);
  return r;
}

InequalityReport nagy_inequality(const GridField& f, const ConvexBody& body, const Cone& cone, double h,
                                 const CheckOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  const GridSpec& grid = f.grid();
  const int d = grid.dimension();
  const double volume = volume_body_cone(body, cone);
  const SupEstimate sup = sup_abs(f, cone);
  const GradientSup grad = grad_sup_polar(f, body, cone);
  const double l1 = l1_norm(f, cone);

  InequalityReport r;
  r.case_id = opts.case_id;
  r.kind = "nagy";
  r.d = d;
  r.m = cone.orthant_m().value_or(-1);
  r.h = h;
  r.lhs = sup.value;
  r.rhs_terms = {{"deviation", d * h / (d + 1.0) * grad.value}, {"l1", l1 / (std::pow(h, d) * volume)}};
  r.argmax = {{"lhs", sup.argmax}, {"gradient", grad.argmax}};
  if (grad.finite_difference) r.warnings.push_back("gradient by finite differences");
  finish(r, grid, opts.expect_equality);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct MixedSups {
  SupEstimate derivative;  // sup|∂_I f|
  GradientSup gradient;    // sup|∇∂_I f|_1
  SupEstimate value;       // sup|f|
};

MixedSups mixed_sups(const MixedFunction& f, const GridSpec& grid, int m) {
  if (grid.dimension() != f.d) throw std::invalid_argument("grid dimension does not match the function");
  const Cone cone = Cone::orthant(f.d, m);
  const GridField mixed = sample_mixed(f, grid);
  const GridField value = sample_value(f, grid);
  return {sup_abs(mixed, cone), grad_sup_polar(mixed, ConvexBody::box(f.d), cone), sup_abs(value, cone)};
}

bool stencil_fits(const GridSpec& grid, const MixedParams& p, std::span<const double> x) {
  const double tol = grid.snap_tol();
  for (int i = 0; i < p.d; ++i) {
    const double lo = i < p.m ? x[i] : x[i] - p.h;
    if (lo < grid.lo(i) - tol || x[i] + p.h > grid.hi(i) + tol) return false;
  }
  return true;
}

bool commensurate(const GridSpec& grid, double h) {
  try {
    for (int i = 0; i < grid.dimension(); ++i) commensurate_steps(grid, i, h);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

// sup over stencil-fitting centers in C, and θ, of |∂_I f - S̄_h f|.
DeviationSup mixed_deviation(const MixedFunction& f, const GridSpec& grid, const MixedParams& p,
                             std::vector<std::string>& warnings) {
  const Cone cone = p.cone();
  const GridField value = sample_value(f, grid);
  DeviationSup out;
  out.argmax.assign(p.d, 0.0);
  std::size_t in_cone = 0;
  auto consider = [&](std::span<const double> x, double dev) {
    ++out.candidates;
    if (dev > out.value) {
      out.value = dev;
      out.argmax.assign(x.begin(), x.end());
    }
  };
  if (commensurate(grid, p.h)) {
    const MaskedField s = mixed_operator_field(value, p);
    for_each_center(grid, [&](std::size_t flat, std::span<const double> x) {
      if (!cone.contains(x)) return;
      ++in_cone;
      if (!s.valid[flat]) return;
      consider(x, std::abs(f.mixed(x) - s.values[flat]));
    });
  } else {
    warnings.push_back("h is not a multiple of the grid spacing; stencil values from the callback");
    for_each_center(grid, [&](std::size_t, std::span<const double> x) {
      if (!cone.contains(x)) return;
      ++in_cone;
      if (!stencil_fits(grid, p, x)) return;
      consider(x, std::abs(f.mixed(x) - mixed_operator_apply(value, p, x)));
    });
  }
  const std::size_t from_grid = out.candidates;
  const Vec origin(p.d, 0.0);
  if (stencil_fits(grid, p, origin)) consider(origin, std::abs(f.mixed(origin) - mixed_operator_apply(value, p, origin)));
  out.coverage = in_cone ? static_cast<double>(from_grid) / static_cast<double>(in_cone) : 0.0;
  return out;
}

}  // namespace

InequalityReport lk_additive_mixed(const MixedFunction& f, const GridSpec& grid, const MixedParams& p,
                                   const CheckOptions& opts) {
  if (f.d != p.d) throw std::invalid_argument("function and parameters differ in dimension");
  const MixedSups s = mixed_sups(f, grid, p.m);
  InequalityReport r;
  r.case_id = opts.case_id.empty() ? f.name : opts.case_id;
  r.kind = "additive-mixed";
  r.d = p.d;
  r.m = p.m;
  r.h = p.h;
  r.lhs = s.derivative.value;
  const double norm = mixed_operator_norm(p);
  r.rhs_terms = {{"deviation", p.d * p.h / (p.d + 1.0) * s.gradient.value}, {"norm", norm * s.value.value}};
  const DeviationSup dev = mixed_deviation(f, grid, p, r.warnings);
  r.chain_terms = {{"deviation", dev.value}, {"norm", norm * s.value.value}};
  finish_chain(r);
  r.coverage = dev.coverage;
  r.argmax = {{"lhs", s.derivative.argmax},
              {"gradient", s.gradient.argmax},
              {"value", s.value.argmax},
              {"deviation", dev.argmax}};
  finish(r, grid, opts.expect_equality);
  return r;
}

InequalityReport lk_multiplicative_mixed(const MixedFunction& f, const GridSpec& grid, int m,
                                         const CheckOptions& opts) {
  const int d = f.d;
  if (m < 0 || m > d) throw std::invalid_argument("mixed setting needs 0 <= m <= d");
  const MixedSups s = mixed_sups(f, grid, m);
  InequalityReport r;
  r.case_id = opts.case_id.empty() ? f.name : opts.case_id;
  r.kind = "multiplicative-mixed";
  r.d = d;
  r.m = m;
  r.lhs = s.derivative.value;
  const double e = 1.0 / (d + 1.0);
  const double scaled = std::ldexp(1.0, m) * (d + 1.0) * s.value.value;
  r.rhs_terms = {{"bound", std::pow(scaled, e) * std::pow(s.gradient.value, d * e)}};
  if (s.gradient.value > 0.0 && s.value.value > 0.0) {
    // the additive bound at its minimizing h
    const double h = std::pow(scaled / s.gradient.value, e);
    r.h = h;
    r.chain_terms = {{"deviation", d * h / (d + 1.0) * s.gradient.value},
                     {"norm", std::ldexp(1.0, m) / std::pow(h, d) * s.value.value}};
    finish_chain(r);
  }
  r.argmax = {{"lhs", s.derivative.argmax}, {"gradient", s.gradient.argmax}, {"value", s.value.argmax}};
  finish(r, grid, opts.expect_equality);
  return r;
}

// ---------------------------------------------------------------------------

double sharpness_ratio(int d, int m, std::span<const double> c, std::span<const double> a) {
  if (static_cast<int>(c.size()) != d || static_cast<int>(a.size()) != d || m < 0 || m > d) {
    throw std::invalid_argument("sharpness candidate has the wrong shape");
  }
  constexpr double h = 1.0;
  double reach = 0.0;
  for (int i = 0; i < m; ++i) reach = std::max(reach, -c[i]);
  const double lhs = std::max(0.0, h - reach);
  if (lhs == 0.0) return 0.0;

  // sup_C |f| is the largest tent mass over boxes Π[a_i, ∞) or Π[lo_i, a_i]
  const Vec zero(static_cast<std::size_t>(d), 0.0);
  Vec lo(d), hi(d), z(d);
  double sup_f = 0.0;
  for (unsigned choice = 0; choice < (1u << d); ++choice) {
    bool empty = false;
    for (int i = 0; i < d; ++i) {
      const double floor_i = i < m ? 0.0 : c[i] - h;
      // x_i ranges over (floor_i, ∞): |f| grows as x_i moves away from a_i
      if ((choice >> i) & 1u) {
        lo[i] = floor_i;
        hi[i] = a[i];
      } else {
        lo[i] = a[i];
        hi[i] = c[i] + h;
      }
      lo[i] = std::max(lo[i], c[i] - h);
      hi[i] = std::min(hi[i], c[i] + h);
      if (hi[i] <= lo[i]) empty = true;
    }
    if (empty) continue;
    double mass = 0.0;
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
      double sign = 1.0;
      for (int i = 0; i < d; ++i) {
        const bool upper = (corner >> i) & 1u;
        z[i] = (upper ? hi[i] : lo[i]) - c[i];
        if (!upper) sign = -sign;
      }
      mass += sign * cube_antiderivative(z, h);
    }
    sup_f = std::max(sup_f, mass);
  }
  const double rhs = std::pow(std::ldexp(1.0, m) * (d + 1.0) * sup_f, 1.0 / (d + 1.0));
  return rhs > 0.0 ? lhs / rhs : 0.0;
}

SharpnessResult sharpness_search(int d, int m, int budget, std::uint64_t seed) {
  if (d < 1 || d > kMaxDimension || m < 1 || m > d) throw std::invalid_argument("search needs 1 <= m <= d <= 6");
  if (budget < 4) throw std::invalid_argument("search budget too small");
  // parameters: c_0..c_{m-1} in [-1, 1], then offsets t_i = a_i - c_i in [-1, 1]
  const int n = m + d;
  SharpnessResult res;
  res.d = d;
  res.m = m;
  auto unpack = [&](const Vec& q, Vec& c, Vec& a) {
    c.assign(d, 0.0);
    a.assign(d, 0.0);
    for (int i = 0; i < m; ++i) c[i] = q[i];
    for (int i = 0; i < d; ++i) a[i] = c[i] + q[m + i];
  };
  Vec best_q(n, 0.0);
  Vec c, a;
  auto evaluate = [&](const Vec& q) {
    unpack(q, c, a);
    const double r = sharpness_ratio(d, m, c, a);
    ++res.evaluations;
    if (r > res.best.ratio) {
      res.best = {c, a, r};
      best_q = q;
      res.trajectory.emplace_back(res.evaluations, r);
    }
    return r;
  };

  SplitMix64 rng(seed);
  Vec q(n);
  const int random_phase = budget / 2;
  for (int k = 0; k < random_phase; ++k) {
    for (auto& v : q) v = rng.uniform(-1.0, 1.0);
    evaluate(q);
  }
  constexpr int kLineIters = 24;
  while (res.evaluations + kLineIters + 2 <= budget) {
    const double before = res.best.ratio;
    for (int j = 0; j < n && res.evaluations + kLineIters + 2 <= budget; ++j) {
      Vec trial = best_q;
      golden_section_maximize(
          [&](double v) {
            trial[j] = v;
            return evaluate(trial);
          },
          -1.0, 1.0, kLineIters);
    }
    if (res.best.ratio <= before) break;
  }
  // then Gaussian steps around the best point with a shrinking radius
  double sigma = 0.1;
  int since_gain = 0;
  while (res.evaluations < budget) {
    Vec trial = best_q;
    for (auto& v : trial) v = std::clamp(v + sigma * rng.normal(), -1.0, 1.0);
    const double before = res.best.ratio;
    evaluate(trial);
    if (res.best.ratio > before) {
      since_gain = 0;
    } else if (++since_gain >= 4 * n) {
      sigma = std::max(1e-6, sigma * 0.5);
      since_gain = 0;
    }
  }
  if (res.best.c.empty()) unpack(best_q, res.best.c, res.best.a);
  return res;
}

}  // namespace chargelab
