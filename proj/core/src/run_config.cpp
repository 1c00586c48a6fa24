#include "fracgrowth/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <fmt/format.h>

#include "fracgrowth/errors.hpp"
#include "fracgrowth/serialization.hpp"
#include "json_io.hpp"

#ifndef FRACGROWTH_VERSION
#define FRACGROWTH_VERSION "unknown"
#endif

namespace fracgrowth {

using detail::check_keys;
using detail::get_bool;
using detail::get_integer;
using detail::get_number;
using detail::get_string;
using detail::Json;

namespace {

void require(bool ok, std::string_view message) {
  if (!ok) throw ValidationError(std::string(message));
}

int get_int_in(const Json& obj, std::string_view key, std::string_view where, int fallback, int lo, int hi) {
  const auto v = get_integer(obj, key, where, fallback);
  if (v < lo || v > hi) throw ValidationError(fmt::format("{}.{} must lie in [{}, {}]", where, key, lo, hi));
  return static_cast<int>(v);
}

const Json& member(const Json& obj, std::string_view key) {
  static const Json empty = Json::object();
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? empty : *it;
}

std::vector<double> number_list(const Json& obj, std::string_view key, std::string_view where,
                                std::vector<double> fallback) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_array()) throw ValidationError(fmt::format("{}.{} must be an array", where, key));
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) throw ValidationError(fmt::format("{}.{} must contain numbers", where, key));
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> int_list(const Json& obj, std::string_view key, std::string_view where, std::vector<int> fallback) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_array()) throw ValidationError(fmt::format("{}.{} must be an array", where, key));
  std::vector<int> out;
  for (const auto& v : *it) {
    if (!v.is_number_integer()) throw ValidationError(fmt::format("{}.{} must contain integers", where, key));
    out.push_back(v.get<int>());
  }
  return out;
}

Polynomial2 polynomial_from(const Json& j, std::string_view where, const Polynomial2& fallback) {
  if (j.is_object() && j.empty()) return fallback;
  check_keys(j, {"c", "x", "y", "xx", "xy", "yy"}, where);
  return {get_number(j, "c", where, 0.0),  get_number(j, "x", where, 0.0),  get_number(j, "y", where, 0.0),
          get_number(j, "xx", where, 0.0), get_number(j, "xy", where, 0.0), get_number(j, "yy", where, 0.0)};
}

Json polynomial_json(const Polynomial2& p) {
  return Json{{"c", p.c}, {"x", p.x}, {"y", p.y}, {"xx", p.xx}, {"xy", p.xy}, {"yy", p.yy}};
}

std::vector<BoundaryPart> parts_from(const Json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return {};
  if (!it->is_array()) throw ValidationError(fmt::format("domain.{} must be an array", key));
  std::vector<BoundaryPart> out;
  for (const auto& p : *it) {
    check_keys(p, {"side", "from", "to"}, "domain boundary part");
    Side side{};
    try {
      side = side_from_string(get_string(p, "side", "domain boundary part", ""));
    } catch (const Error& e) {
      throw ValidationError(e.what());
    }
    out.push_back({side, get_number(p, "from", "domain boundary part"), get_number(p, "to", "domain boundary part")});
  }
  return out;
}

Json parts_json(const std::vector<BoundaryPart>& parts) {
  Json out = Json::array();
  for (const auto& p : parts) out.push_back(Json{{"side", std::string(to_string(p.side))}, {"from", p.from}, {"to", p.to}});
  return out;
}

bool positive_list(const std::vector<double>& v) {
  if (v.empty()) return false;
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  return true;
}

RunConfig from_json(const Json& root) {
  check_keys(root, {"curve", "crack", "domain", "physics", "solver", "evolution", "curve_output", "dimension",
                    "converge", "output", "seed", "threads"},
             "config");
  RunConfig c;

  if (const auto& j = member(root, "curve"); !j.empty()) {
    const auto kind = get_string(j, "kind", "curve", "koch");
    Json geometry = j;
    geometry.erase("holder_depth");
    if (!geometry.contains("kind")) geometry["kind"] = kind;
    const auto curve = detail::curve_geometry_from(geometry);
    c.curve.kind = curve.kind();
    if (c.curve.kind != "koch") {
      c.curve.maps.assign(curve.maps().begin(), curve.maps().end());
      c.curve.alpha = curve.alpha();
      c.curve.ell = curve.ell();
    }
    c.curve.holder_depth = get_int_in(j, "holder_depth", "curve", 6, 2, 8);
  }

  if (const auto& j = member(root, "crack"); !j.empty()) {
    check_keys(j, {"psi", "angle", "reflect", "a", "origin"}, "crack");
    if (const auto it = j.find("psi"); it != j.end()) {
      require(it->is_array(), "crack.psi must be an array of [s, vx, vy] triples");
      for (const auto& row : *it) {
        require(row.is_array() && row.size() == 3 && row[0].is_number() && row[1].is_number() && row[2].is_number(),
                "crack.psi entries must be [s, vx, vy] numbers");
        c.crack.psi.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
      }
    }
    c.crack.angle = get_number(j, "angle", "crack", 0.0);
    c.crack.reflect = get_bool(j, "reflect", "crack", false);
    c.crack.a = get_number(j, "a", "crack", 1.0);
    require(c.crack.a >= 0.0, "crack.a must be non-negative");
    const auto origin = number_list(j, "origin", "crack", {0.0, 0.0});
    require(origin.size() == 2, "crack.origin must be [x, y]");
    c.crack.origin = {origin[0], origin[1]};
  }

  if (const auto& j = member(root, "domain"); !j.empty()) {
    check_keys(j, {"x_min", "x_max", "y_min", "y_max", "h", "dirichlet", "neumann"}, "domain");
    c.domain.x_min = get_number(j, "x_min", "domain", 0.0);
    c.domain.x_max = get_number(j, "x_max", "domain", 1.0);
    c.domain.y_min = get_number(j, "y_min", "domain", 0.0);
    c.domain.y_max = get_number(j, "y_max", "domain", 1.0);
    c.domain.h = get_number(j, "h", "domain", 1.0 / 64.0);
    require(c.domain.h > 0.0, "domain.h must be positive");
    require(c.domain.x_max > c.domain.x_min && c.domain.y_max > c.domain.y_min, "domain must have positive extent");
    c.domain.dirichlet = parts_from(j, "dirichlet");
    c.domain.neumann = parts_from(j, "neumann");
  }

  if (const auto& j = member(root, "physics"); !j.empty()) {
    check_keys(j, {"kind", "integrand", "p", "lambda", "mu", "w0", "w0x", "w0y"}, "physics");
    c.physics.kind = get_string(j, "kind", "physics", "scalar");
    require(c.physics.kind == "scalar" || c.physics.kind == "planar", "physics.kind must be \"scalar\" or \"planar\"");
    c.physics.integrand = get_string(j, "integrand", "physics", "quadratic");
    require(c.physics.integrand == "quadratic" || c.physics.integrand == "p_power",
            "physics.integrand must be \"quadratic\" or \"p_power\"");
    c.physics.p = get_number(j, "p", "physics", 2.0);
    require(c.physics.p > 1.0 && c.physics.p <= 2.0, "physics.p must lie in (1, 2]");
    require(c.physics.integrand == "p_power" || c.physics.p == 2.0, "the quadratic integrand needs p = 2");
    c.physics.lambda = get_number(j, "lambda", "physics", 0.0);
    c.physics.mu = get_number(j, "mu", "physics", 1.0);
    require(c.physics.lambda >= 0.0 && c.physics.mu > 0.0, "physics needs lambda >= 0 and mu > 0");
    c.physics.w0 = polynomial_from(member(j, "w0"), "physics.w0", c.physics.w0);
    c.physics.w0x = polynomial_from(member(j, "w0x"), "physics.w0x", c.physics.w0x);
    c.physics.w0y = polynomial_from(member(j, "w0y"), "physics.w0y", c.physics.w0y);
  }

  if (const auto& j = member(root, "solver"); !j.empty()) {
    check_keys(j, {"linear_tolerance", "gradient_tolerance", "iteration_cap", "newton_cap", "hessian_floor"}, "solver");
    const SolverSettings defaults;
    c.solver.linear_tolerance = get_number(j, "linear_tolerance", "solver", defaults.linear_tolerance);
    c.solver.gradient_tolerance = get_number(j, "gradient_tolerance", "solver", defaults.gradient_tolerance);
    c.solver.iteration_cap = get_integer(j, "iteration_cap", "solver", defaults.iteration_cap);
    c.solver.newton_cap = get_int_in(j, "newton_cap", "solver", defaults.newton_cap, 1, 100000);
    c.solver.hessian_floor = get_number(j, "hessian_floor", "solver", defaults.hessian_floor);
    require(c.solver.linear_tolerance > 0.0 && c.solver.gradient_tolerance > 0.0 && c.solver.hessian_floor > 0.0,
            "solver tolerances must be positive");
    require(c.solver.iteration_cap >= 0, "solver.iteration_cap must be non-negative");
  }

  if (const auto& j = member(root, "evolution"); !j.empty()) {
    check_keys(j, {"delta_a", "steps", "a0", "load", "times", "raster_depth", "enforce_coupling", "stability_tolerance"},
               "evolution");
    c.evolution.delta_a = get_number(j, "delta_a", "evolution", 1.0 / 16.0);
    require(c.evolution.delta_a > 0.0, "evolution.delta_a must be positive");
    c.evolution.steps = get_int_in(j, "steps", "evolution", 8, 1, 1000000);
    c.evolution.a0 = get_number(j, "a0", "evolution", 0.0);
    require(c.evolution.a0 >= 0.0, "evolution.a0 must be non-negative");
    if (const auto it = j.find("load"); it != j.end()) {
      require(it->is_array(), "evolution.load must be an array of [t, lambda] pairs");
      c.evolution.load.clear();
      for (const auto& k : *it) {
        require(k.is_array() && k.size() == 2 && k[0].is_number() && k[1].is_number(),
                "evolution.load entries must be [t, lambda] numbers");
        c.evolution.load.push_back({k[0].get<double>(), k[1].get<double>()});
      }
      LoadProgram check(c.evolution.load);
    }
    c.evolution.times = number_list(j, "times", "evolution", {});
    c.evolution.raster_depth = get_int_in(j, "raster_depth", "evolution", 4, 1, 15);
    c.evolution.enforce_coupling = get_bool(j, "enforce_coupling", "evolution", true);
    c.evolution.stability_tolerance = get_number(j, "stability_tolerance", "evolution", 2e-9);
    require(c.evolution.stability_tolerance >= 0.0, "evolution.stability_tolerance must be non-negative");
  }

  if (const auto& j = member(root, "curve_output"); !j.empty()) {
    check_keys(j, {"depth", "holder_depth"}, "curve_output");
    c.curve_output.depth = get_int_in(j, "depth", "curve_output", 4, 0, 12);
    c.curve_output.holder_depth = get_int_in(j, "holder_depth", "curve_output", 6, 2, 8);
  }

  if (const auto& j = member(root, "dimension"); !j.empty()) {
    check_keys(j, {"depth", "eps", "content_depths", "content_eps", "deep_depth"}, "dimension");
    c.dimension.depth = get_int_in(j, "depth", "dimension", 8, 0, 12);
    c.dimension.eps = number_list(j, "eps", "dimension", c.dimension.eps);
    require(positive_list(c.dimension.eps), "dimension.eps must be a non-empty list of positive numbers");
    c.dimension.content_depths = int_list(j, "content_depths", "dimension", c.dimension.content_depths);
    for (int d : c.dimension.content_depths) require(d >= 0 && d <= 8, "dimension.content_depths must lie in [0, 8]");
    c.dimension.content_eps = number_list(j, "content_eps", "dimension", c.dimension.content_eps);
    require(positive_list(c.dimension.content_eps), "dimension.content_eps must be a non-empty list of positive numbers");
    c.dimension.deep_depth = get_int_in(j, "deep_depth", "dimension", 10, 0, 12);
  }

  if (const auto& j = member(root, "converge"); !j.empty()) {
    check_keys(j, {"depths"}, "converge");
    c.converge.depths = int_list(j, "depths", "converge", c.converge.depths);
    require(!c.converge.depths.empty(), "converge.depths must not be empty");
    for (std::size_t k = 0; k < c.converge.depths.size(); ++k) {
      require(c.converge.depths[k] >= 1 && c.converge.depths[k] <= 12, "converge.depths must lie in [1, 12]");
      require(k == 0 || c.converge.depths[k] > c.converge.depths[k - 1], "converge.depths must increase strictly");
    }
  }

  if (const auto& j = member(root, "output"); !j.empty()) {
    check_keys(j, {"dir", "fields", "masks"}, "output");
    c.output.dir = get_string(j, "dir", "output", "out");
    c.output.fields = get_bool(j, "fields", "output", true);
    c.output.masks = get_bool(j, "masks", "output", true);
  }

  if (const auto it = root.find("seed"); it != root.end()) {
    require(it->is_number_unsigned() || (it->is_number_integer() && it->get<long long>() >= 0),
            "seed must be a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  c.threads = get_int_in(root, "threads", "config", 1, 1, 256);
  return c;
}

Json to_json_value(const RunConfig& c) {
  Json curve{{"kind", c.curve.kind}};
  if (c.curve.kind != "koch") {
    Json maps = Json::array();
    for (const auto& m : c.curve.maps)
      maps.push_back(Json{{"ratio", m.ratio}, {"angle", m.angle}, {"tx", m.tx}, {"ty", m.ty}});
    curve["maps"] = maps;
    curve["alpha"] = c.curve.alpha;
    curve["ell"] = c.curve.ell;
  }
  curve["holder_depth"] = c.curve.holder_depth;

  Json psi = Json::array();
  for (const auto& row : c.crack.psi) psi.push_back(Json::array({row[0], row[1], row[2]}));
  Json load = Json::array();
  for (const auto& k : c.evolution.load) load.push_back(Json::array({k.t, k.lambda}));

  return Json{
      {"curve", curve},
      {"crack",
       {{"psi", psi},
        {"angle", c.crack.angle},
        {"reflect", c.crack.reflect},
        {"a", c.crack.a},
        {"origin", Json::array({c.crack.origin[0], c.crack.origin[1]})}}},
      {"domain",
       {{"x_min", c.domain.x_min},
        {"x_max", c.domain.x_max},
        {"y_min", c.domain.y_min},
        {"y_max", c.domain.y_max},
        {"h", c.domain.h},
        {"dirichlet", parts_json(c.domain.dirichlet)},
        {"neumann", parts_json(c.domain.neumann)}}},
      {"physics",
       {{"kind", c.physics.kind},
        {"integrand", c.physics.integrand},
        {"p", c.physics.p},
        {"lambda", c.physics.lambda},
        {"mu", c.physics.mu},
        {"w0", polynomial_json(c.physics.w0)},
        {"w0x", polynomial_json(c.physics.w0x)},
        {"w0y", polynomial_json(c.physics.w0y)}}},
      {"solver",
       {{"linear_tolerance", c.solver.linear_tolerance},
        {"gradient_tolerance", c.solver.gradient_tolerance},
        {"iteration_cap", c.solver.iteration_cap},
        {"newton_cap", c.solver.newton_cap},
        {"hessian_floor", c.solver.hessian_floor}}},
      {"evolution",
       {{"delta_a", c.evolution.delta_a},
        {"steps", c.evolution.steps},
        {"a0", c.evolution.a0},
        {"load", load},
        {"times", c.evolution.times},
        {"raster_depth", c.evolution.raster_depth},
        {"enforce_coupling", c.evolution.enforce_coupling},
        {"stability_tolerance", c.evolution.stability_tolerance}}},
      {"curve_output", {{"depth", c.curve_output.depth}, {"holder_depth", c.curve_output.holder_depth}}},
      {"dimension",
       {{"depth", c.dimension.depth},
        {"eps", c.dimension.eps},
        {"content_depths", c.dimension.content_depths},
        {"content_eps", c.dimension.content_eps},
        {"deep_depth", c.dimension.deep_depth}}},
      {"converge", {{"depths", c.converge.depths}}},
      {"output", {{"dir", c.output.dir}, {"fields", c.output.fields}, {"masks", c.output.masks}}},
      {"seed", c.seed},
      {"threads", c.threads},
  };
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  try {
    return from_json(detail::parse_json(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid config: {}", e.what()));
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& config) { return to_json_value(config).dump(2) + "\n"; }

std::uint64_t config_hash(const RunConfig& config) { return fnv1a64(to_json_value(config).dump()); }

std::shared_ptr<const AlphaCurve> build_curve(const RunConfig& config) {
  AlphaCurve geometry = config.curve.kind == "koch"
                            ? AlphaCurve::from_ifs(koch_maps(), std::log(4.0) / std::log(3.0), 1.0, "koch")
                            : AlphaCurve::from_ifs(config.curve.maps, config.curve.alpha, config.curve.ell);
  return std::make_shared<const AlphaCurve>(detail::certify(geometry, config.curve.holder_depth, config.seed));
}

Crack build_crack(const RunConfig& config, std::shared_ptr<const AlphaCurve> curve) {
  Perturbation psi = Perturbation::zero(curve->ell());
  if (!config.crack.psi.empty()) {
    Json rows = Json::array();
    for (const auto& r : config.crack.psi) rows.push_back(Json::array({r[0], r[1], r[2]}));
    psi = detail::psi_from(rows, curve->ell());
  }
  const double a = std::min(config.crack.a, curve->ell());
  if (config.crack.a > curve->ell() * (1.0 + 1e-12)) throw ValidationError("crack.a exceeds ell");
  return Crack(std::move(curve), std::move(psi), {config.crack.angle, config.crack.reflect}, a,
               {config.crack.origin[0], config.crack.origin[1]});
}

Domain build_domain(const RunConfig& config) {
  const auto& d = config.domain;
  if (d.dirichlet.empty() && d.neumann.empty()) {
    const std::vector<BoundaryPart> all{{Side::bottom, d.x_min, d.x_max},
                                       {Side::right, d.y_min, d.y_max},
                                       {Side::top, d.x_min, d.x_max},
                                       {Side::left, d.y_min, d.y_max}};
    return Domain(d.x_min, d.x_max, d.y_min, d.y_max, d.h, all, {});
  }
  return Domain(d.x_min, d.x_max, d.y_min, d.y_max, d.h, d.dirichlet, d.neumann);
}

Physics build_physics(const RunConfig& config) {
  const auto& p = config.physics;
  if (p.kind == "planar") return PlanarPhysics{ElasticityTensor(p.lambda, p.mu), p.w0x, p.w0y};
  return ScalarPhysics{p.integrand == "p_power" ? Integrand::p_power(p.p) : Integrand::quadratic(), p.w0};
}

EvolutionConfig build_evolution(const RunConfig& config) {
  EvolutionConfig ec;
  ec.domain = build_domain(config);
  ec.family = build_crack(config, build_curve(config)).with_tip(0.0);
  ec.delta_a = config.evolution.delta_a;
  ec.steps = config.evolution.steps;
  ec.a0 = config.evolution.a0;
  ec.load = LoadProgram(config.evolution.load);
  ec.physics = build_physics(config);
  ec.solver = config.solver;
  ec.raster_depth = config.evolution.raster_depth;
  ec.enforce_coupling = config.evolution.enforce_coupling;
  ec.times = config.evolution.times;
  ec.threads = config.threads;
  ec.stability_tolerance = config.evolution.stability_tolerance;
  return ec;
}

std::string manifest_json(const RunConfig& config, std::string_view command,
                          const std::map<std::string, double>& timings, const std::vector<std::string>& outputs) {
  Json timing = Json::object();
  for (const auto& [k, v] : timings) timing[k] = v;
  Json m{
      {"command", std::string(command)},
      {"config_hash", hex64(config_hash(config))},
      {"versions",
       {{"fracgrowth", FRACGROWTH_VERSION},
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
        {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
        {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                      NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__}}},
      {"timings_seconds", timing},
      {"outputs", outputs},
      {"config", to_json_value(config)},
  };
  return m.dump(2) + "\n";
}

RunConfig config_from_manifest(std::string_view manifest_text) {
  const auto j = detail::parse_json(manifest_text);
  if (!j.is_object() || !j.contains("config")) throw ValidationError("manifest has no \"config\" member");
  return from_json(j["config"]);
}

}  // namespace fracgrowth
