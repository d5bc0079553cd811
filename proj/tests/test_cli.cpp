#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chargelab/commands.hpp"
#include "chargelab/config.hpp"
#include "chargelab/report_io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace chargelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "chargelab_unit" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(ExperimentConfig cfg, const fs::path& out, std::string* err_text = nullptr) {
  cfg.out = out.string();
  std::ostringstream log, err;
  const int code = run_command(cfg, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      R"({"d": 3, "m": 1, "case": "gaussian", "h": [0.5, 1], "seed": 42,
          "body": {"kind": "pball", "p": 3}, "family": {"center": [0, 0, 0.5], "width": 0.3}})",
      "verify");
  CHECK(c.command == "verify");
  CHECK(c.d == 3);
  CHECK(c.h.size() == 2);
  CHECK(c.seed == 42);
  CHECK(c.body.kind == "pball");
  CHECK(c.family.width == 0.3);
  CHECK(parse_config(R"({"h": 2})", "verify").h == std::vector<double>{2.0});
  const ExperimentConfig s = parse_config(R"({"setting": "mixed", "N": {"min": 0.1, "max": 10, "count": 5}})",
                                          "stechkin-curve");
  CHECK(s.n_grid.count == 5);
}

TEST_CASE("shipped example configs load") {
  int count = 0;
  for (const auto& e : fs::directory_iterator(CHARGELAB_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    const auto j = nlohmann::json::parse(slurp(e.path()));
    const std::string command = j.at("command").get<std::string>();
    CHECK_NOTHROW(load_config(e.path().string(), command));
    ++count;
  }
  CHECK(count >= 5);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(R"({"d": 2, "colour": 1})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"budget": 10})", "verify"), ConfigError);  // key of another command
  CHECK_THROWS_AS(parse_config(R"({"d": "two"})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"d": 2)", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"command": "recover"})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": 30})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"m": 4, "d": 3})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"h": [1, -1]})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"body": {"kind": "box", "size": 2}})", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}", "plot"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json", "verify"), ConfigError);
  CHECK_THROWS_AS(make_body(BodySpec{"sphere"}, 2), ConfigError);
  BodySpec poly;
  poly.kind = "polygon";
  poly.sides = 5;
  CHECK_THROWS_AS(make_body(poly, 2), ConfigError);
  poly.sides = 6;
  CHECK_THROWS_AS(make_body(poly, 3), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("report serialization") {
  InequalityReport r;
  r.case_id = "c";
  r.kind = "additive-charge";
  r.d = 2;
  r.h = 0.5;
  r.grid = "8x8";
  r.lhs = 1.0;
  r.rhs = INFINITY;
  r.slack = INFINITY;
  r.rhs_terms = {{"deviation", 0.5}, {"norm", INFINITY}};
  CHECK(csv_header() == "case,d,m,h,grid,lhs,rhs,slack,equality,coverage");
  CHECK(csv_row(r) == "c/additive-charge,2,0,0.5,8x8,1,inf,inf,false,1");
  const auto j = nlohmann::json::parse(reports_json({r, r}));
  REQUIRE(j.size() == 2);
  CHECK(j[0]["rhs"] == "inf");
  CHECK(j[0]["rhs_terms"]["deviation"] == 0.5);
  CHECK_FALSE(j[0].contains("chain"));
  CHECK(j[0]["failures"][0] == "non-finite");
}

TEST_CASE("svg chart") {
  const std::string svg =
      svg_loglog("t <1>", "N", "E", {{"line", {{0.01, 5.0}, {100.0, 0.01}}, true}, {"pts", {{1.0, 0.25}, {-1, 2}}, false}});
  CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(svg.find("t &lt;1&gt;") != std::string::npos);
  CHECK(svg.find(">1e-2<") != std::string::npos);
  CHECK(svg.find(">1e2<") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  // the point with a negative coordinate is skipped
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  CHECK(circles == 1);
}

TEST_CASE("verify: exit codes") {
  ExperimentConfig cfg;
  cfg.command = "verify";
  SUBCASE("extremal charge, d = 2, h = 1, grid 256: equality, exit 0") {
    cfg.grid = 256;
    const fs::path out = scratch("extremal");
    CHECK(run(cfg, out) == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "verify.json"));
    for (const auto& r : j) {
      CHECK(r["equality"] == true);
      CHECK(std::abs(r["slack"].get<double>()) <= 1e-3);
    }
  }
  SUBCASE("zero density: all-zero rows, exit 0") {
    cfg.case_name = "zero";
    cfg.grid = 16;
    const fs::path out = scratch("zero");
    CHECK(run(cfg, out) == kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "verify.json"));
    for (const auto& r : j) {
      CHECK(r["lhs"] == 0.0);
      CHECK(r["rhs"] == 0.0);
    }
  }
  SUBCASE("corrupted extremal: exit 1 with a failure list") {
    cfg.case_name = "corrupted-extremal";
    cfg.grid = 64;
    std::string err;
    CHECK(run(cfg, scratch("corrupt"), &err) == kExitFailures);
    CHECK(err.find("FAILED corrupted-extremal/additive-charge") != std::string::npos);
    CHECK(err.find("negative-slack") != std::string::npos);
  }
  SUBCASE("invalid configuration: exit 2") {
    cfg.case_name = "nope";
    CHECK(run(cfg, scratch("bad")) == kExitInvalidConfig);
    cfg.case_name = "zero";
    cfg.d = 0;
    CHECK(run(cfg, scratch("bad")) == kExitInvalidConfig);
  }
  SUBCASE("failure while running: exit 3") {
    // the output directory is a regular file
    const fs::path blocker = scratch("blocker");
    fs::create_directories(blocker.parent_path());
    std::ofstream(blocker) << "x";
    cfg.case_name = "zero";
    cfg.grid = 16;
    std::string err;
    CHECK(run(cfg, blocker, &err) == kExitNumericalFailure);
    CHECK_FALSE(err.empty());
  }
}

TEST_CASE("mixed verify cases") {
  ExperimentConfig cfg;
  cfg.command = "verify";
  cfg.h = {0.5, 1.0};
  for (const char* name : {"mixed-m0", "mixed-m1", "trig", "gaussian-product"}) {
    cfg.case_name = name;
    cfg.m = 1;
    CHECK_MESSAGE(run(cfg, scratch(name)) == kExitOk, name);
  }
}

TEST_CASE("outputs are byte-identical across runs") {
  ExperimentConfig cfg;
  cfg.command = "verify";
  cfg.case_name = "random-suite";
  cfg.suite = 3;
  cfg.grid = 32;
  cfg.seed = 77;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run(cfg, a) == kExitOk);
  REQUIRE(run(cfg, b) == kExitOk);
  CHECK(slurp(a / "verify.csv") == slurp(b / "verify.csv"));
  CHECK(slurp(a / "verify.json") == slurp(b / "verify.json"));
  cfg.seed = 78;
  const fs::path c = scratch("det_c");
  REQUIRE(run(cfg, c) == kExitOk);
  CHECK(slurp(a / "verify.csv") != slurp(c / "verify.csv"));
}

TEST_CASE("stechkin-curve writes curve, sandwich and attained points") {
  ExperimentConfig cfg;
  cfg.command = "stechkin-curve";
  cfg.d = 1;
  cfg.h = {0.5};
  const fs::path out = scratch("curve");
  CHECK(run(cfg, out) == kExitOk);
  CHECK(fs::exists(out / "stechkin_curve.svg"));
  const std::string sandwich = slurp(out / "sandwich.csv");
  CHECK(std::count(sandwich.begin(), sandwich.end(), '\n') == 17);
  CHECK(sandwich.find("false") == std::string::npos);
  CHECK(slurp(out / "attained.csv").find("0.5,1,0.25") != std::string::npos);
}

TEST_CASE("recover and sharpness-search") {
  ExperimentConfig cfg;
  cfg.command = "recover";
  cfg.d = 1;
  cfg.deltas = {0.1};
  const fs::path out = scratch("recover");
  CHECK(run(cfg, out) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(out / "recover.json"));
  CHECK(j.size() == 2);
  CHECK(fs::exists(out / j[0]["field"].get<std::string>()));
  CHECK(fs::exists(out / "recover.svg"));

  ExperimentConfig s;
  s.command = "sharpness-search";
  s.d = 2;
  s.m = 2;
  s.budget = 500;
  const fs::path sout = scratch("sharp");
  CHECK(run(s, sout) == kExitOk);
  const auto sj = nlohmann::json::parse(slurp(sout / "sharpness.json"));
  CHECK(sj["exploratory"] == true);
  CHECK(sj["best_ratio"].get<double>() <= 1.0 + 1e-6);
  s.m = 0;
  CHECK(run(s, scratch("sharp0")) == kExitInvalidConfig);
}
