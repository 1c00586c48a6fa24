#include "fracgrowth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

// One direction of the Hausdorff distance with early break: once a point of
// B closer than the running maximum is found, the point of A cannot raise it.
double directed_hausdorff(std::span<const Point> A, std::span<const Point> B) {
  std::vector<std::size_t> order(B.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(0x5eedULL);
  std::shuffle(order.begin(), order.end(), rng);

  double cmax = 0.0;
  for (const auto& a : A) {
    double cmin = std::numeric_limits<double>::infinity();
    bool skip = false;
    for (std::size_t idx : order) {
      const double d2 = (a - B[idx]).squaredNorm();
      if (d2 < cmax) {
        skip = true;
        break;
      }
      cmin = std::min(cmin, d2);
    }
    if (!skip) cmax = std::max(cmax, cmin);
  }
  return std::sqrt(cmax);
}

std::int64_t cells_along(double extent, double eps) {
  const double n = std::ceil(extent / eps - 1e-9);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
}

// Half-open cell index along one axis; quotients within rounding noise of a
// grid line count as lying on it, so vertices placed exactly on a grid line
// always go to the cell on their right.
std::int64_t cell_along(double offset, double eps, std::int64_t cells) {
  const double q = offset / eps;
  const double nearest = std::nearbyint(q);
  const double snap = 1e-9 * std::max(1.0, std::abs(q));
  const double v = std::abs(q - nearest) <= snap ? nearest : std::floor(q);
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), 0, cells - 1);
}

}  // namespace

BoundingBox bounding_box(std::span<const Point> points) {
  if (points.empty()) throw DomainError("bounding box of an empty set");
  BoundingBox box{points.front(), points.front()};
  for (const auto& p : points) {
    if (!p.allFinite()) throw DomainError("non-finite coordinate");
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

double hausdorff_distance(std::span<const Point> A, std::span<const Point> B) {
  if (A.empty() || B.empty()) throw DomainError("Hausdorff distance needs non-empty sets");
  return std::max(directed_hausdorff(A, B), directed_hausdorff(B, A));
}

std::size_t box_count(std::span<const Point> points, double eps) {
  if (!(eps > 0.0)) throw DomainError("box size must be positive");
  if (points.empty()) return 0;
  const auto box = bounding_box(points);
  const auto nx = cells_along(box.max.x() - box.min.x(), eps);
  const auto ny = cells_along(box.max.y() - box.min.y(), eps);

  std::unordered_set<std::uint64_t> occupied;
  occupied.reserve(points.size());
  for (const auto& p : points) {
    const auto i = cell_along(p.x() - box.min.x(), eps, nx);
    const auto j = cell_along(p.y() - box.min.y(), eps, ny);
    occupied.insert(static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(ny) + static_cast<std::uint64_t>(j));
  }
  return occupied.size();
}

DimensionEstimate box_dimension_estimate(std::span<const Point> points, std::span<const double> eps_list) {
  if (points.empty()) throw DomainError("dimension estimate of an empty set");
  if (eps_list.size() < 3) throw DomainError("need at least three box sizes");
  const auto [lo, hi] = std::minmax_element(eps_list.begin(), eps_list.end());
  if (!(*lo > 0.0)) throw DomainError("box sizes must be positive");
  if (*hi / *lo < 10.0 - 1e-9) throw DomainError("box sizes must span at least one decade");

  DimensionEstimate est;
  const double resolution = sampling_resolution(points);
  std::vector<double> xs, ys;
  for (double eps : eps_list) {
    const auto n = box_count(points, eps);
    est.counts.push_back(n);
    xs.push_back(std::log(1.0 / eps));
    ys.push_back(std::log(static_cast<double>(n)));
    if (eps < resolution) est.below_resolution = true;
  }

  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return est;
}

double alpha_content(std::span<const Point> points, double eps, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  return static_cast<double>(box_count(points, eps)) * std::pow(eps, alpha);
}

double sampling_resolution(std::span<const Point> points) {
  if (points.size() < 2) return 0.0;
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return points[a].x() < points[b].x(); });

  double worst = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Point& p = points[idx[k]];
    double best2 = std::numeric_limits<double>::infinity();
    for (std::size_t l = k + 1; l < idx.size(); ++l) {
      const double dx = points[idx[l]].x() - p.x();
      if (dx * dx >= best2) break;
      best2 = std::min(best2, (points[idx[l]] - p).squaredNorm());
    }
    for (std::size_t l = k; l-- > 0;) {
      const double dx = p.x() - points[idx[l]].x();
      if (dx * dx >= best2) break;
      best2 = std::min(best2, (points[idx[l]] - p).squaredNorm());
    }
    worst = std::max(worst, best2);
  }
  return std::sqrt(worst);
}

PointSet densify(std::span<const Point> polyline, double max_spacing) {
  if (!(max_spacing > 0.0)) throw DomainError("spacing must be positive");
  PointSet out;
  if (polyline.empty()) return out;
  out.push_back(polyline.front());
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Point d = polyline[i] - polyline[i - 1];
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(d.norm() / max_spacing)));
    for (std::size_t k = 1; k <= pieces; ++k)
      out.push_back(polyline[i - 1] + (static_cast<double>(k) / static_cast<double>(pieces)) * d);
  }
  return out;
}

}  // namespace fracgrowth
