#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracgrowth/fractal_curve.hpp"

namespace fracgrowth {

/// Finite sample of a compact planar set.
using PointSet = std::vector<Point>;

struct BoundingBox {
  Point min{0.0, 0.0};
  Point max{0.0, 0.0};

  double area() const { return (max - min).prod(); }
};

/// Throws DomainError for an empty or non-finite set.
BoundingBox bounding_box(std::span<const Point> points);

/// Exact discrete Hausdorff distance max(sup_A d(., B), sup_B d(., A)).
double hausdorff_distance(std::span<const Point> A, std::span<const Point> B);

/// Occupied cells of the side-eps grid anchored at the bounding-box min
/// corner. Cells are half-open; the last cell along each axis is closed at
/// the bounding-box max, so an axis of extent E has ceil(E / eps) cells
/// (at least one).
std::size_t box_count(std::span<const Point> points, double eps);

struct DimensionEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool below_resolution = false;  ///< some eps finer than the sampling spacing
  std::vector<std::size_t> counts;
};

/// Least-squares slope of log N(eps) against log(1/eps). Needs at least
/// three eps values spanning a decade.
DimensionEstimate box_dimension_estimate(std::span<const Point> points, std::span<const double> eps_list);

/// Covering content N(eps) * eps^alpha (normalization omega_alpha = 1).
double alpha_content(std::span<const Point> points, double eps, double alpha);

/// Largest nearest-neighbour distance in the set (0 for a single point).
double sampling_resolution(std::span<const Point> points);

/// Inserts points along every segment of an open polyline so that no gap
/// exceeds `max_spacing`.
PointSet densify(std::span<const Point> polyline, double max_spacing);

}  // namespace fracgrowth
