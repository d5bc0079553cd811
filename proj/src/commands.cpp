#include "chargelab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "chargelab/charge.hpp"
#include "chargelab/families.hpp"
#include "chargelab/report_io.hpp"
#include "chargelab/stechkin.hpp"
#include "json.hpp"

namespace chargelab {
namespace {

using nlohmann::ordered_json;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

bool is_mixed_case(const std::string& name) {
  return name == "mixed-m0" || name == "mixed-m1" || name == "trig" || name == "gaussian-product";
}

GridSpec scaled_grid(const Cone& cone, const ConvexBody& body, double extent, int n) {
  Vec half = body.bounding_half_widths();
  for (auto& w : half) w *= extent;
  return GridSpec::symmetric(cone, half, n);
}

// Free axes [-extent, extent] with n cells, orthant axes [0, extent] with n/2.
GridSpec mixed_grid(int d, int m, double extent, int n) {
  Vec lo(d), hi(d);
  std::vector<int> cells(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = i < m ? 0.0 : -extent;
    hi[i] = extent;
    cells[i] = i < m ? n / 2 : n;
  }
  return GridSpec(lo, hi, cells);
}

struct ChargeCase {
  std::string id;
  Charge charge;
  bool expect_equality;
};

void charge_reports(const ChargeCase& c, const ConvexBody& body, const std::vector<double>& hs,
                    std::vector<InequalityReport>& out) {
  CheckOptions opts;
  opts.case_id = c.id;
  opts.expect_equality = c.expect_equality;
  for (double h : hs) out.push_back(lk_additive_charge(c.charge, body, h, opts));
  out.push_back(lk_multiplicative_charge(c.charge, body, opts));
  for (double h : hs) out.push_back(nagy_inequality(c.charge.density(), body, c.charge.cone(), h, opts));
}

GridField family_density(const ExperimentConfig& cfg, const ConvexBody& body, const Cone& cone, int n) {
  const FamilySpec& fam = cfg.family;
  const int d = cfg.d;
  Vec center = fam.center.empty() ? Vec(d, 0.0) : fam.center;
  if (static_cast<int>(center.size()) != d) throw ConfigError("family.center must have d entries");
  double reach = 0.0;
  for (double v : center) reach = std::max(reach, std::abs(v));
  const std::string& name = cfg.case_name;
  if (name == "gaussian") {
    const double extent = fam.extent > 0.0 ? fam.extent : reach + 6.0 * fam.width;
    return gaussian_density(scaled_grid(cone, body, extent, n), center, fam.width, fam.amplitude);
  }
  if (name == "poly") {
    const double extent = fam.extent > 0.0 ? fam.extent : reach + 1.25 * fam.radius;
    return poly_bump_density(scaled_grid(cone, body, extent, n), center, fam.radius, fam.amplitude);
  }
  if (name == "sin") {
    return sin_density(scaled_grid(cone, ConvexBody::box(d), fam.extent > 0.0 ? fam.extent : 2.25, n));
  }
  if (name == "csv") {
    if (fam.path.empty()) throw ConfigError("case csv needs family.path");
    return load_density_csv(scaled_grid(cone, body, fam.extent > 0.0 ? fam.extent : 1.0, n), fam.path);
  }
  throw ConfigError("unknown family case '" + name + "'");
}

void mixed_reports(const ExperimentConfig& cfg, int n, std::vector<InequalityReport>& out) {
  const int d = cfg.d;
  const std::string& name = cfg.case_name;
  CheckOptions opts;
  opts.case_id = name;
  if (name == "mixed-m0" || name == "mixed-m1") {
    const int m = name == "mixed-m0" ? 0 : 1;
    opts.expect_equality = true;
    for (double h : cfg.h) {
      const MixedFunction f = m == 0 ? extremal_mixed_m0(h, d) : extremal_mixed_m1(h, d);
      const GridSpec grid = mixed_grid(d, m, 2.0 * h, n);
      out.push_back(lk_additive_mixed(f, grid, MixedParams(d, m, h), opts));
      out.push_back(lk_multiplicative_mixed(f, grid, m, opts));
    }
    return;
  }
  const int m = cfg.m;
  MixedFunction f;
  GridSpec grid = mixed_grid(d, m, 1.0, n);
  if (name == "trig") {
    f = random_trig_polynomial(d, cfg.seed);
    // one period (length 2, n cells) plus room for the widest stencil
    const double pad = std::ceil(*std::max_element(cfg.h.begin(), cfg.h.end()));
    const int pad_cells = static_cast<int>(pad) * n / 2;
    Vec lo(d), hi(d);
    std::vector<int> cells(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = i < m ? 0.0 : -1.0 - pad;
      hi[i] = 1.0 + pad;
      if (i < m) hi[i] += 1.0;
      cells[i] = n + (i < m ? 1 : 2) * pad_cells;
    }
    grid = GridSpec(lo, hi, cells);
  } else {
    const Vec center = cfg.family.center.empty() ? Vec(d, 0.0) : cfg.family.center;
    if (static_cast<int>(center.size()) != d) throw ConfigError("family.center must have d entries");
    f = gaussian_product(center, cfg.family.width, cfg.family.amplitude);
    double reach = 0.0;
    for (double v : center) reach = std::max(reach, std::abs(v));
    grid = mixed_grid(d, m, cfg.family.extent > 0.0 ? cfg.family.extent : reach + 6.0 * cfg.family.width, n);
  }
  for (double h : cfg.h) out.push_back(lk_additive_mixed(f, grid, MixedParams(d, m, h), opts));
  out.push_back(lk_multiplicative_mixed(f, grid, m, opts));
}

void write_lines(std::ostream& log, const std::vector<InequalityReport>& reports) {
  for (const auto& r : reports) {
    log << (r.passed() ? "PASS " : "FAIL ") << r.case_id << ' ' << r.kind << " d=" << r.d << " m=" << r.m
        << " h=" << format_double(r.h) << " lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs)
        << " slack=" << format_double(r.slack) << '\n';
  }
}

int report_failures(std::ostream& err, const std::vector<std::string>& failures) {
  for (const auto& f : failures) err << "FAILED " << f << '\n';
  return failures.empty() ? kExitOk : kExitFailures;
}

}  // namespace

int default_grid(const ExperimentConfig& cfg) {
  if (cfg.grid > 0) return cfg.grid;
  const bool mixed = (cfg.command == "verify" && is_mixed_case(cfg.case_name)) ||
                     (cfg.command != "verify" && cfg.setting == "mixed");
  if (mixed) return cfg.d <= 2 ? 64 : (cfg.d == 3 ? 32 : 16);
  // general bodies and cones sum their windows run by run, far slower than boxes
  const bool box = cfg.body.kind == "box" && cfg.cone.kind == "orthant";
  if (cfg.d <= 2) return 256;
  if (cfg.d == 3) return box ? 128 : 32;
  return box ? 24 : 12;
}

const std::vector<std::string>& verify_case_names() {
  static const std::vector<std::string> names = {
      "extremal-charge", "corrupted-extremal", "zero", "gaussian", "poly", "sin", "csv", "random-suite",
      "mixed-m0", "mixed-m1", "trig", "gaussian-product"};
  return names;
}

std::vector<InequalityReport> verify_reports(const ExperimentConfig& cfg) {
  const auto& names = verify_case_names();
  if (std::find(names.begin(), names.end(), cfg.case_name) == names.end()) {
    throw ConfigError("unknown case '" + cfg.case_name + "'");
  }
  const int n = default_grid(cfg);
  std::vector<InequalityReport> out;
  if (is_mixed_case(cfg.case_name)) {
    mixed_reports(cfg, n, out);
    return out;
  }
  const ConvexBody body = make_body(cfg.body, cfg.d);
  const Cone cone = make_cone(cfg.cone, cfg.d, cfg.m);
  const std::string& name = cfg.case_name;
  if (name == "extremal-charge" || name == "corrupted-extremal") {
    for (double h : cfg.h) {
      const GridSpec grid = aligned_grid(body, cone, h, n);
      GridField f = extremal_density(body, cone, h, grid);
      const bool corrupt = name == "corrupted-extremal";
      if (corrupt) {
        // reports half the true gradient, so the gradient bound is violated
        const GridField base = f;
        f = f.with_gradient([base](std::span<const double> x, std::span<double> g) {
          base.gradient(x, g);
          for (auto& v : g) v *= 0.5;
        });
      }
      charge_reports({name, Charge(f, cone), !corrupt}, body, {h}, out);
    }
  } else if (name == "zero") {
    const GridSpec grid = scaled_grid(cone, body, 1.0, n);
    charge_reports({name, Charge(GridField::zeros(grid), cone), true}, body, cfg.h, out);
  } else if (name == "random-suite") {
    const GridSpec grid = scaled_grid(cone, body, 1.0, n);
    for (int k = 0; k < cfg.suite; ++k) {
      const GridField f = random_smooth_density(grid, cfg.seed + static_cast<std::uint64_t>(k));
      charge_reports({"random-" + std::to_string(k), Charge(f, cone), false}, body, cfg.h, out);
    }
  } else {
    charge_reports({name, Charge(family_density(cfg, body, cone, n), cone), false}, body, cfg.h, out);
  }
  return out;
}

int run_verify(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  const auto reports = verify_reports(cfg);
  std::string csv = csv_header() + "\n";
  for (const auto& r : reports) csv += csv_row(r) + "\n";
  write_text_file(out_path(cfg, "verify.csv"), csv);
  write_text_file(out_path(cfg, "verify.json"), reports_json(reports));
  write_lines(log, reports);
  std::vector<std::string> failures;
  for (const auto& r : reports) {
    const auto f = r.failures();
    if (f.empty()) continue;
    std::string line = r.case_id + "/" + r.kind + " d=" + std::to_string(r.d) + " h=" + format_double(r.h) + ":";
    for (const auto& name : f) line += " " + name;
    failures.push_back(line);
  }
  return report_failures(err, failures);
}

int run_stechkin_curve(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  const bool mixed = cfg.setting == "mixed";
  const ConvexBody body = mixed ? ConvexBody::box(cfg.d) : make_body(cfg.body, cfg.d);
  const Cone cone = mixed ? Cone::orthant(cfg.d, cfg.m) : make_cone(cfg.cone, cfg.d, cfg.m);
  const ProblemSetting setting = mixed ? ProblemSetting::mixed(cfg.d, cfg.m) : ProblemSetting::charge(body, cone);
  const int n = default_grid(cfg);
  std::vector<std::string> failures;

  const auto Ns = log_space(cfg.n_grid.min, cfg.n_grid.max, cfg.n_grid.count);
  const auto curve = stechkin_curve(setting, Ns);
  std::string csv = "N,E_N,h\n";
  for (const auto& p : curve) csv += format_double(p.N) + "," + format_double(p.error) + "," + format_double(p.h) + "\n";
  write_text_file(out_path(cfg, "stechkin_curve.csv"), csv);

  const auto deltas = cfg.deltas.empty() ? log_space(1e-3, 1e2, 16) : cfg.deltas;
  const auto rows = sandwich_check(setting, deltas);
  csv = "delta,omega,inf_value,argmin_N,relative_gap,ok\n";
  for (const auto& r : rows) {
    csv += format_double(r.delta) + "," + format_double(r.omega) + "," + format_double(r.inf_value) + "," +
           format_double(r.argmin_N) + "," + format_double(r.relative_gap) + "," + (r.ok ? "true" : "false") + "\n";
    log << (r.ok ? "PASS" : "FAIL") << " sandwich delta=" << format_double(r.delta)
        << " gap=" << format_double(r.relative_gap) << '\n';
    if (!r.ok) failures.push_back("sandwich delta=" + format_double(r.delta));
  }
  write_text_file(out_path(cfg, "sandwich.csv"), csv);

  // attained points: deviation of the averaging operator on the extremal input
  std::vector<std::pair<double, double>> attained;
  csv = "h,N,measured,closed_form,abs_error\n";
  if (mixed && cfg.m > 1) {
    log << "NOTE no extremal input is known for m >= 2; attained points skipped\n";
  } else {
    for (double h : cfg.h) {
      double measured;
      if (mixed) {
        const MixedFunction f = cfg.m == 0 ? extremal_mixed_m0(h, cfg.d) : extremal_mixed_m1(h, cfg.d);
        const GridSpec grid = mixed_grid(cfg.d, cfg.m, 2.0 * h, n);
        InequalityReport r = lk_additive_mixed(f, grid, MixedParams(cfg.d, cfg.m, h));
        measured = r.chain_terms.at(0).value;
      } else {
        const GridSpec grid = aligned_grid(body, cone, h, n);
        const Charge nu(extremal_density(body, cone, h, grid), cone);
        measured = deviation_sup(nu, SteklovParams(body, cone, h, setting.volume())).value;
      }
      const double N = operator_norm(setting, h);
      const double closed = stechkin_error(setting, N);
      const double e = std::abs(measured - closed);
      attained.emplace_back(N, measured);
      csv += format_double(h) + "," + format_double(N) + "," + format_double(measured) + "," + format_double(closed) +
             "," + format_double(e) + "\n";
      const bool ok = e <= 1e-3;
      log << (ok ? "PASS" : "FAIL") << " attained h=" << format_double(h) << " N=" << format_double(N)
          << " measured=" << format_double(measured) << " closed=" << format_double(closed) << '\n';
      if (!ok) failures.push_back("attained h=" + format_double(h));
    }
  }
  write_text_file(out_path(cfg, "attained.csv"), csv);

  std::vector<std::pair<double, double>> line;
  for (const auto& p : curve) line.emplace_back(p.N, p.error);
  write_text_file(out_path(cfg, "stechkin_curve.svg"),
                  svg_loglog("Best approximation error E_N (" + setting.describe() + ")", "N", "E_N",
                             {{"closed form", line, true, "#1f77b4"}, {"attained", attained, false, "#d62728"}}));
  return report_failures(err, failures);
}

int run_recover(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  const bool mixed = cfg.setting == "mixed";
  const int n = default_grid(cfg);
  const auto deltas = cfg.deltas.empty() ? std::vector<double>{0.01, 0.1, 1.0} : cfg.deltas;
  std::vector<RecoveryDemo> demos;
  for (double delta : deltas) {
    if (mixed) {
      if (cfg.m <= 1) demos.push_back(worst_case_mixed_recovery(cfg.d, cfg.m, delta, n));
      demos.push_back(typical_mixed_recovery(cfg.d, cfg.m, delta, n, cfg.seed));
    } else {
      const ConvexBody body = make_body(cfg.body, cfg.d);
      const Cone cone = make_cone(cfg.cone, cfg.d, cfg.m);
      demos.push_back(worst_case_recovery(body, cone, delta, n));
      demos.push_back(typical_recovery(body, cone, delta, n, cfg.seed));
    }
  }

  std::vector<std::string> failures;
  std::string csv = "kind,delta,omega,h,error,bound,perturbation_norm,coverage,grid\n";
  ordered_json summary = ordered_json::array();
  std::vector<std::pair<double, double>> worst_pts, typical_pts;
  int index = 0;
  for (const auto& demo : demos) {
    const RecoveryResult& r = *demo.result;
    csv += demo.kind + "," + format_double(demo.delta) + "," + format_double(demo.omega) + "," + format_double(demo.h) +
           "," + format_double(demo.error) + "," + format_double(r.bound) + "," +
           format_double(demo.perturbation_norm) + "," + format_double(demo.coverage) + "," + demo.grid + "\n";
    bool ok;
    if (demo.kind == "worst-case") {
      ok = std::abs(demo.error - demo.omega) <= 1e-3;
      worst_pts.emplace_back(demo.delta, demo.error);
    } else {
      ok = demo.error < demo.omega;
      typical_pts.emplace_back(demo.delta, demo.error);
    }
    log << (ok ? "PASS " : "FAIL ") << demo.kind << " delta=" << format_double(demo.delta)
        << " error=" << format_double(demo.error) << " omega=" << format_double(demo.omega) << '\n';
    if (!ok) failures.push_back(demo.kind + " delta=" + format_double(demo.delta));

    const std::string field_name = "recover_field_" + demo.kind + "_" + std::to_string(index++) + ".csv";
    std::string dump = "index";
    const GridSpec& grid = r.estimate.grid;
    for (int i = 0; i < grid.dimension(); ++i) dump += ",x" + std::to_string(i + 1);
    dump += ",estimate,valid\n";
    Vec x(grid.dimension());
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
      grid.center(flat, x);
      dump += std::to_string(flat);
      for (double v : x) dump += "," + format_double(v);
      dump += "," + format_double(r.estimate.values[flat]) + "," + (r.estimate.valid[flat] ? "1" : "0") + "\n";
    }
    write_text_file(out_path(cfg, field_name), dump);

    ordered_json j;
    j["kind"] = demo.kind;
    j["setting"] = mixed ? "mixed" : "charge";
    j["delta"] = demo.delta;
    j["omega"] = number(demo.omega);
    j["h"] = number(demo.h);
    j["error"] = number(demo.error);
    j["bound"] = number(r.bound);
    j["perturbation_norm"] = number(demo.perturbation_norm);
    j["coverage"] = number(demo.coverage);
    j["grid"] = demo.grid;
    j["field"] = field_name;
    j["warnings"] = demo.warnings;
    j["passed"] = ok;
    summary.push_back(j);
  }
  write_text_file(out_path(cfg, "recover.csv"), csv);
  write_text_file(out_path(cfg, "recover.json"), summary.dump(2) + "\n");

  const ProblemSetting setting = mixed ? ProblemSetting::mixed(cfg.d, cfg.m)
                                       : ProblemSetting::charge(make_body(cfg.body, cfg.d),
                                                                make_cone(cfg.cone, cfg.d, cfg.m));
  const double lo = *std::min_element(deltas.begin(), deltas.end());
  const double hi = *std::max_element(deltas.begin(), deltas.end());
  std::vector<std::pair<double, double>> curve;
  for (double delta : log_space(lo / 2.0, hi * 2.0, 64)) curve.emplace_back(delta, omega(setting, delta));
  write_text_file(out_path(cfg, "recover.svg"),
                  svg_loglog("Recovery error vs noise level", "delta", "sup error",
                             {{"Omega(delta)", curve, true, "#1f77b4"},
                              {"worst case", worst_pts, false, "#d62728"},
                              {"typical", typical_pts, false, "#2ca02c"}}));
  return report_failures(err, failures);
}

int run_sharpness_search(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  const int m = cfg.cone.m.value_or(cfg.m);
  const SharpnessResult res = sharpness_search(cfg.d, m, cfg.budget, cfg.seed);
  std::string csv = "evaluation,best_ratio\n";
  for (const auto& [k, r] : res.trajectory) csv += std::to_string(k) + "," + format_double(r) + "\n";
  write_text_file(out_path(cfg, "sharpness.csv"), csv);
  ordered_json j;
  j["exploratory"] = true;
  j["d"] = res.d;
  j["m"] = res.m;
  j["best_ratio"] = res.best.ratio;
  j["tent_center"] = res.best.c;
  j["lower_limits"] = res.best.a;
  j["evaluations"] = res.evaluations;
  j["seed"] = cfg.seed;
  write_text_file(out_path(cfg, "sharpness.json"), j.dump(2) + "\n");
  log << "EXPLORATORY sharpness search d=" << res.d << " m=" << res.m << " best ratio " << format_double(res.best.ratio)
      << " after " << res.evaluations << " evaluations\n";
  std::vector<std::string> failures;
  if (res.best.ratio > 1.0 + 1e-6) failures.push_back("ratio above 1: " + format_double(res.best.ratio));
  return report_failures(err, failures);
}

int run_command(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.command == "verify") return run_verify(cfg, log, err);
    if (cfg.command == "stechkin-curve") return run_stechkin_curve(cfg, log, err);
    if (cfg.command == "recover") return run_recover(cfg, log, err);
    if (cfg.command == "sharpness-search") return run_sharpness_search(cfg, log, err);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitInvalidConfig;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

}  // namespace chargelab
