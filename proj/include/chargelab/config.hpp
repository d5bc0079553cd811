#pragma once

// Experiment configuration: a JSON file validated against the keys allowed for
// the selected command, then overridden by command-line flags.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chargelab/geometry.hpp"

namespace chargelab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BodySpec {
  std::string kind = "box";  // box, cross, pball, polygon, polytope
  double p = 2.0;
  int sides = 6;
  double circumradius = 1.0;
  std::vector<Vec> vertices;
};

struct ConeSpec {
  std::string kind = "orthant";  // orthant, halfspaces
  std::optional<int> m;          // falls back to the top-level m
  std::vector<Vec> normals;
};

struct FamilySpec {
  std::string name;  // gaussian, poly, sin, random, csv
  Vec center;
  double width = 0.5;
  double radius = 1.0;
  double amplitude = 1.0;
  double extent = 0.0;  // grid half width; 0 picks a default for the family
  std::string path;
};

struct NGridSpec {
  double min = 1e-3;
  double max = 1e3;
  int count = 64;
};

struct ExperimentConfig {
  std::string command;
  std::string out = ".";
  std::uint64_t seed = 1;
  int grid = 0;  // 0: per-command default
  int d = 2;
  int m = 0;
  BodySpec body;
  ConeSpec cone;

  // verify
  std::string case_name = "extremal-charge";
  std::vector<double> h = {1.0};
  FamilySpec family;
  int suite = 100;

  // stechkin-curve, recover
  std::string setting = "charge";  // charge, mixed
  NGridSpec n_grid;
  std::vector<double> deltas;

  // sharpness-search
  int budget = 100000;
};

inline constexpr std::string_view kCommands[] = {"verify", "stechkin-curve", "recover", "sharpness-search"};

// Parses JSON text. Throws ConfigError on syntax errors, unknown keys, wrong
// types or out-of-range values.
ExperimentConfig parse_config(std::string_view json_text, std::string_view command);
ExperimentConfig load_config(const std::string& path, std::string_view command);

// Range and consistency checks shared by the file and flag paths.
void validate(const ExperimentConfig& cfg);

ConvexBody make_body(const BodySpec& spec, int d);
Cone make_cone(const ConeSpec& spec, int d, int m);

}  // namespace chargelab
