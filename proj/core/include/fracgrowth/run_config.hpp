#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracgrowth/domain.hpp"
#include "fracgrowth/elastic_solver.hpp"
#include "fracgrowth/evolution.hpp"
#include "fracgrowth/field.hpp"
#include "fracgrowth/fractal_curve.hpp"

namespace fracgrowth {

struct CurveSpec {
  std::string kind = "koch";
  std::vector<SimilarityMap> maps;  ///< "ifs" only
  double alpha = 0.0;               ///< "ifs" only
  double ell = 1.0;                 ///< "ifs" only
  int holder_depth = 6;
  bool operator==(const CurveSpec&) const = default;
};

struct CrackSpec {
  std::vector<std::array<double, 3>> psi;  ///< empty means psi = 0
  double angle = 0.0;
  bool reflect = false;
  double a = 1.0;
  std::array<double, 2> origin{0.0, 0.0};
  bool operator==(const CrackSpec&) const = default;
};

struct DomainSpec {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  double h = 1.0 / 64.0;
  /// Both empty means the whole boundary is Dirichlet.
  std::vector<BoundaryPart> dirichlet, neumann;
  bool operator==(const DomainSpec&) const = default;
};

struct PhysicsSpec {
  std::string kind = "scalar";         ///< "scalar" or "planar"
  std::string integrand = "quadratic";  ///< "quadratic" or "p_power"
  double p = 2.0;
  double lambda = 0.0, mu = 1.0;
  Polynomial2 w0{0.0, 1.0};
  Polynomial2 w0x{0.0, 1.0}, w0y{0.0, 0.0, 1.0};
  bool operator==(const PhysicsSpec&) const = default;
};

struct EvolutionSpec {
  double delta_a = 1.0 / 16.0;
  int steps = 8;
  double a0 = 0.0;
  std::vector<LoadKnot> load{{0.0, 0.0}, {1.0, 1.0}};
  std::vector<double> times;
  int raster_depth = 4;
  bool enforce_coupling = true;
  double stability_tolerance = 2e-9;
  bool operator==(const EvolutionSpec&) const = default;
};

struct CurveOutputSpec {
  int depth = 4;
  int holder_depth = 6;
  bool operator==(const CurveOutputSpec&) const = default;
};

struct DimensionSpec {
  int depth = 8;
  std::vector<double> eps{1.0 / 27, 1.0 / 81, 1.0 / 243, 1.0 / 729, 1.0 / 2187};
  std::vector<int> content_depths{0, 1, 2, 3};
  std::vector<double> content_eps{1.0 / 3, 1.0 / 9, 1.0 / 27, 1.0 / 81, 1.0 / 243, 1.0 / 729};
  int deep_depth = 10;
  bool operator==(const DimensionSpec&) const = default;
};

struct ConvergeSpec {
  std::vector<int> depths{2, 3, 4, 5, 6};
  bool operator==(const ConvergeSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  bool fields = true;
  bool masks = true;
  bool operator==(const OutputSpec&) const = default;
};

/// Complete description of one batch run; see docs/config_schema.md.
struct RunConfig {
  CurveSpec curve;
  CrackSpec crack;
  DomainSpec domain;
  PhysicsSpec physics;
  SolverSettings solver;
  EvolutionSpec evolution;
  CurveOutputSpec curve_output;
  DimensionSpec dimension;
  ConvergeSpec converge;
  OutputSpec output;
  std::uint64_t seed = 0;
  int threads = 1;
  bool operator==(const RunConfig&) const = default;
};

/// Throws ValidationError on malformed JSON, unknown keys or out-of-range
/// values.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Normalized JSON with every key spelled out; parses back to an equal
/// RunConfig.
std::string to_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

std::shared_ptr<const AlphaCurve> build_curve(const RunConfig& config);
Crack build_crack(const RunConfig& config, std::shared_ptr<const AlphaCurve> curve);
Domain build_domain(const RunConfig& config);
Physics build_physics(const RunConfig& config);
EvolutionConfig build_evolution(const RunConfig& config);

/// Manifest JSON: normalized config, config hash, library versions,
/// wall-clock timings in seconds and the list of written files.
std::string manifest_json(const RunConfig& config, std::string_view command,
                          const std::map<std::string, double>& timings, const std::vector<std::string>& outputs);
/// Extracts and parses the "config" member of a manifest.
RunConfig config_from_manifest(std::string_view manifest_text);

}  // namespace fracgrowth
