#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fracgrowth {

using Point = Eigen::Vector2d;

/// Planar similarity x -> ratio * Rot(angle) * x + (tx, ty).
struct SimilarityMap {
  double ratio = 1.0;
  double angle = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  Point apply(const Point& p) const;
  bool operator==(const SimilarityMap&) const = default;
};

/// Self-similar curve of dimension alpha in (1, 2), generated by an
/// end-to-end connected, equal-ratio IFS acting on the base segment
/// [(0,0), (1,0)].
///
/// The natural self-similar parameter s in [0, ell] is the alpha-measure of
/// the arc gamma[0, s]: each of the k^n level-n cells carries measure
/// ell / k^n.
class AlphaCurve {
 public:
  /// Validates the IFS and takes the Hölder constants as given (use
  /// `certified` to attach empirically estimated ones).
  static AlphaCurve from_ifs(std::vector<SimilarityMap> maps, double alpha, double ell = 1.0,
                             std::string kind = "ifs");

  double alpha() const noexcept { return alpha_; }
  double ell() const noexcept { return ell_; }
  std::span<const SimilarityMap> maps() const noexcept { return maps_; }
  std::size_t branching() const noexcept { return maps_.size(); }
  double ratio() const noexcept { return maps_.front().ratio; }
  double holder_c() const noexcept { return holder_c_; }
  double holder_C() const noexcept { return holder_C_; }
  const std::string& kind() const noexcept { return kind_; }

  /// Diameter of the attractor (1 for the Koch curve).
  double diameter() const noexcept { return diameter_; }
  /// Diameter bound of a depth-level cell: diameter * ratio^depth.
  double cell_diameter(int depth) const;
  /// Number of level-`depth` cells, k^depth.
  std::uint64_t cell_count(int depth) const;
  /// Parameter of the m-th junction at `depth`: m * ell / k^depth.
  double junction_parameter(std::uint64_t m, int depth) const;

  AlphaCurve with_holder_constants(double c, double C) const;

  bool same_geometry(const AlphaCurve& other) const;

 private:
  AlphaCurve() = default;

  std::vector<SimilarityMap> maps_;
  double alpha_ = 0.0;
  double ell_ = 1.0;
  double holder_c_ = 0.0;
  double holder_C_ = 0.0;
  double diameter_ = 1.0;
  std::string kind_;
};

/// Uncertified von Koch IFS maps.
std::vector<SimilarityMap> koch_maps();

/// The 4-map von Koch generator, alpha = log 4 / log 3, ell = 1, with
/// Hölder constants certified at sampling depth max(depth_hint, 2).
AlphaCurve koch_curve(int depth_hint);

/// Point of the curve at parameter s, truncating the base-k expansion of
/// s / ell after `depth` digits. Junction parameters map exactly to the
/// shared endpoint of neighbouring cells.
Point evaluate(const AlphaCurve& curve, double s, int depth);

/// Level-n polygonal approximation, k^n + 1 vertices in curve order.
std::vector<Point> prefractal(const AlphaCurve& curve, int n);

struct HolderEstimate {
  double c_est = 0.0;
  double C_est = 0.0;
  std::size_t pairs = 0;
};

/// Min and max of |gamma(s1) - gamma(s2)| / |s1 - s2|^(1/alpha) over every
/// pair of depth-level junction parameters, plus `pair_budget` pseudo-random
/// pairs drawn from `seed` on the (depth + 4)-level junction grid.
HolderEstimate estimate_holder_constants(const AlphaCurve& curve, int depth,
                                         std::size_t pair_budget, std::uint64_t seed);

/// alpha-measure of gamma[s1, s2], i.e. s2 - s1.
double measure_of_arc(const AlphaCurve& curve, double s1, double s2);

/// Sum of ratio_i^alpha over the maps (1 for a valid curve).
double moran_sum(const AlphaCurve& curve);

}  // namespace fracgrowth
