#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chargelab/commands.hpp"
#include "chargelab/config.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::string> case_name;
  std::optional<int> d;
  std::optional<int> m;
  std::vector<double> h;
  std::vector<double> deltas;
  std::optional<int> budget;
  std::optional<int> suite;
  std::optional<std::string> setting;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON experiment config");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--grid", o.grid, "grid cells per free axis");
  sub->add_option("--d", o.d, "dimension");
  sub->add_option("--m", o.m, "number of orthant axes in the cone");
}

void apply(const Overrides& o, chargelab::ExperimentConfig& cfg) {
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.grid) cfg.grid = *o.grid;
  if (o.case_name) cfg.case_name = *o.case_name;
  if (o.d) cfg.d = *o.d;
  if (o.m) {
    cfg.m = *o.m;
    cfg.cone.m.reset();
  }
  if (!o.h.empty()) cfg.h = o.h;
  if (!o.deltas.empty()) cfg.deltas = o.deltas;
  if (o.budget) cfg.budget = *o.budget;
  if (o.suite) cfg.suite = *o.suite;
  if (o.setting) cfg.setting = *o.setting;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for Landau-Kolmogorov inequalities on convex cones"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  Overrides o;

  auto* verify = app.add_subcommand("verify", "check the inequalities on a test case");
  add_common(verify, o);
  verify->add_option("--case", o.case_name, "test case name");
  verify->add_option("--h", o.h, "step sizes")->take_all();
  verify->add_option("--suite", o.suite, "random-suite size");

  auto* curve = app.add_subcommand("stechkin-curve", "best approximation curve and sandwich check");
  add_common(curve, o);
  curve->add_option("--setting", o.setting, "charge or mixed");
  curve->add_option("--h", o.h, "steps for attained points")->take_all();
  curve->add_option("--delta", o.deltas, "noise levels")->take_all();

  auto* recover = app.add_subcommand("recover", "recovery from noisy data");
  add_common(recover, o);
  recover->add_option("--setting", o.setting, "charge or mixed");
  recover->add_option("--delta", o.deltas, "noise levels")->take_all();

  auto* sharp = app.add_subcommand("sharpness-search", "search for inputs approaching equality");
  add_common(sharp, o);
  sharp->add_option("--budget", o.budget, "ratio evaluations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return chargelab::kExitInvalidConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  chargelab::ExperimentConfig cfg;
  try {
    if (!o.config.empty()) {
      cfg = chargelab::load_config(o.config, command);
    } else {
      cfg.command = command;
    }
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return chargelab::kExitInvalidConfig;
  }
  apply(o, cfg);
  return chargelab::run_command(cfg, std::cout, std::cerr);
}
