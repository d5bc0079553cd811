#include "chargelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace chargelab {
namespace {

using nlohmann::json;

const std::set<std::string> kCommon = {"command", "out", "seed", "grid", "d", "m", "body", "cone"};

std::set<std::string> allowed_keys(std::string_view command) {
  std::set<std::string> keys = kCommon;
  if (command == "verify") {
    keys.insert({"case", "h", "family", "suite"});
  } else if (command == "stechkin-curve") {
    keys.insert({"setting", "N", "deltas", "h"});
  } else if (command == "recover") {
    keys.insert({"setting", "deltas"});
  } else if (command == "sharpness-search") {
    keys.insert({"budget"});
  } else {
    throw ConfigError("unknown command '" + std::string(command) + "'");
  }
  return keys;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(what + " must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(what + " must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<Vec> point_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of points");
  std::vector<Vec> out;
  for (const auto& p : v) out.push_back(number_list(p, what));
  return out;
}

BodySpec parse_body(const json& j) {
  reject_unknown(j, {"kind", "p", "sides", "circumradius", "vertices"}, "body");
  BodySpec b;
  if (j.contains("kind")) b.kind = get<std::string>(j, "kind", "body");
  if (j.contains("p")) b.p = get<double>(j, "p", "body");
  if (j.contains("sides")) b.sides = get<int>(j, "sides", "body");
  if (j.contains("circumradius")) b.circumradius = get<double>(j, "circumradius", "body");
  if (j.contains("vertices")) b.vertices = point_list(j.at("vertices"), "body.vertices");
  return b;
}

ConeSpec parse_cone(const json& j) {
  reject_unknown(j, {"kind", "m", "normals"}, "cone");
  ConeSpec c;
  if (j.contains("kind")) c.kind = get<std::string>(j, "kind", "cone");
  if (j.contains("m")) c.m = get<int>(j, "m", "cone");
  if (j.contains("normals")) c.normals = point_list(j.at("normals"), "cone.normals");
  return c;
}

FamilySpec parse_family(const json& j) {
  reject_unknown(j, {"name", "center", "width", "radius", "amplitude", "extent", "path"}, "family");
  FamilySpec f;
  if (j.contains("name")) f.name = get<std::string>(j, "name", "family");
  if (j.contains("center")) f.center = number_list(j.at("center"), "family.center");
  if (j.contains("width")) f.width = get<double>(j, "width", "family");
  if (j.contains("radius")) f.radius = get<double>(j, "radius", "family");
  if (j.contains("amplitude")) f.amplitude = get<double>(j, "amplitude", "family");
  if (j.contains("extent")) f.extent = get<double>(j, "extent", "family");
  if (j.contains("path")) f.path = get<std::string>(j, "path", "family");
  return f;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, std::string_view command) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, allowed_keys(command), "config");
  ExperimentConfig cfg;
  cfg.command = std::string(command);
  if (j.contains("command") && get<std::string>(j, "command", "config") != command) {
    throw ConfigError("config is for command '" + get<std::string>(j, "command", "config") + "'");
  }
  if (j.contains("out")) cfg.out = get<std::string>(j, "out", "config");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "config");
  if (j.contains("grid")) cfg.grid = get<int>(j, "grid", "config");
  if (j.contains("d")) cfg.d = get<int>(j, "d", "config");
  if (j.contains("m")) cfg.m = get<int>(j, "m", "config");
  if (j.contains("body")) cfg.body = parse_body(j.at("body"));
  if (j.contains("cone")) cfg.cone = parse_cone(j.at("cone"));
  if (j.contains("case")) cfg.case_name = get<std::string>(j, "case", "config");
  if (j.contains("h")) cfg.h = number_list(j.at("h"), "h");
  if (j.contains("family")) cfg.family = parse_family(j.at("family"));
  if (j.contains("suite")) cfg.suite = get<int>(j, "suite", "config");
  if (j.contains("setting")) cfg.setting = get<std::string>(j, "setting", "config");
  if (j.contains("deltas")) cfg.deltas = number_list(j.at("deltas"), "deltas");
  if (j.contains("budget")) cfg.budget = get<int>(j, "budget", "config");
  if (j.contains("N")) {
    const json& n = j.at("N");
    reject_unknown(n, {"min", "max", "count"}, "N");
    if (n.contains("min")) cfg.n_grid.min = get<double>(n, "min", "N");
    if (n.contains("max")) cfg.n_grid.max = get<double>(n, "max", "N");
    if (n.contains("count")) cfg.n_grid.count = get<int>(n, "count", "N");
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::string_view command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), command);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.d < 1 || cfg.d > kMaxDimension) throw ConfigError("d must be in 1..6");
  if (cfg.m < 0 || cfg.m > cfg.d) throw ConfigError("m must be in 0..d");
  if (cfg.cone.m && (*cfg.cone.m < 0 || *cfg.cone.m > cfg.d)) throw ConfigError("cone.m must be in 0..d");
  if (cfg.grid != 0 && (cfg.grid < 8 || cfg.grid % 4 != 0)) throw ConfigError("grid must be a multiple of 4, >= 8");
  for (double h : cfg.h)
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("every h must be positive");
  if (cfg.h.empty()) throw ConfigError("h list is empty");
  for (double delta : cfg.deltas)
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("every delta must be positive");
  if (cfg.setting != "charge" && cfg.setting != "mixed") throw ConfigError("setting must be 'charge' or 'mixed'");
  if (!(cfg.n_grid.min > 0.0) || !(cfg.n_grid.max > cfg.n_grid.min) || cfg.n_grid.count < 2) {
    throw ConfigError("N grid needs 0 < min < max and count >= 2");
  }
  if (cfg.suite < 1) throw ConfigError("suite must be positive");
  if (cfg.budget < 4) throw ConfigError("budget must be at least 4");
}

ConvexBody make_body(const BodySpec& spec, int d) {
  ConvexBody body = [&] {
    try {
      if (spec.kind == "box") return ConvexBody::box(d);
      if (spec.kind == "cross") return ConvexBody::cross_polytope(d);
      if (spec.kind == "pball") return ConvexBody::pball(d, spec.p);
      if (spec.kind == "polygon") return ConvexBody::regular_polygon(spec.sides, spec.circumradius);
      if (spec.kind == "polytope") return ConvexBody::from_vertices(spec.vertices);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid body: ") + e.what());
    }
    throw ConfigError("unknown body kind '" + spec.kind + "'");
  }();
  if (body.dimension() != d) throw ConfigError("body dimension does not match d");
  return body;
}

Cone make_cone(const ConeSpec& spec, int d, int m) {
  try {
    if (spec.kind == "orthant") return Cone::orthant(d, spec.m.value_or(m));
    if (spec.kind == "halfspaces") return Cone::halfspaces(d, spec.normals);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid cone: ") + e.what());
  }
  throw ConfigError("unknown cone kind '" + spec.kind + "'");
}

}  // namespace chargelab
