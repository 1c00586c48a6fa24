#include "fracgrowth/crack_mask.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool within_box(const Point& p, const Point& a, const Point& b, double tol) {
  return p.x() >= std::min(a.x(), b.x()) - tol && p.x() <= std::max(a.x(), b.x()) + tol &&
         p.y() >= std::min(a.y(), b.y()) - tol && p.y() <= std::max(a.y(), b.y()) + tol;
}

bool point_on_segment(const Point& p, const Point& a, const Point& b, double tol) {
  const Point d = b - a;
  const double len = d.norm();
  if (len == 0.0) return (p - a).norm() <= tol;
  return std::abs(cross(d, p - a)) / len <= tol && within_box(p, a, b, tol);
}

// Closed segments [p1, p2] and [q1, q2] share a point (touching counts).
bool segments_meet(const Point& p1, const Point& p2, const Point& q1, const Point& q2, double tol) {
  if ((p2 - p1).norm() == 0.0) return point_on_segment(p1, q1, q2, tol);
  if ((q2 - q1).norm() == 0.0) return point_on_segment(q1, p1, p2, tol);
  const double o1 = cross(p2 - p1, q1 - p1);
  const double o2 = cross(p2 - p1, q2 - p1);
  const double o3 = cross(q2 - q1, p1 - q1);
  const double o4 = cross(q2 - q1, p2 - q1);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  return point_on_segment(q1, p1, p2, tol) || point_on_segment(q2, p1, p2, tol) ||
         point_on_segment(p1, q1, q2, tol) || point_on_segment(p2, q1, q2, tol);
}

}  // namespace

DiscreteCrackMask::DiscreteCrackMask(int nx, int ny)
    : nx_(nx), ny_(ny),
      h_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny + 1), 0),
      v_(static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny), 0) {}

std::size_t DiscreteCrackMask::severed_count() const {
  return static_cast<std::size_t>(std::count(h_.begin(), h_.end(), 1) + std::count(v_.begin(), v_.end(), 1));
}

std::vector<GridEdge> DiscreteCrackMask::severed_edges() const {
  std::vector<GridEdge> out;
  for (int j = 0; j <= ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (horizontal(i, j)) out.push_back({i, j, i + 1, j});
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i <= nx_; ++i)
      if (vertical(i, j)) out.push_back({i, j, i, j + 1});
  return out;
}

bool DiscreteCrackMask::subset_of(const DiscreteCrackMask& other) const {
  if (nx_ != other.nx_ || ny_ != other.ny_) return false;
  for (std::size_t k = 0; k < h_.size(); ++k)
    if (h_[k] && !other.h_[k]) return false;
  for (std::size_t k = 0; k < v_.size(); ++k)
    if (v_[k] && !other.v_[k]) return false;
  return true;
}

bool DiscreteCrackMask::node_isolated(int i, int j) const {
  if (i > 0 && !horizontal(i - 1, j)) return false;
  if (i < nx_ && !horizontal(i, j)) return false;
  if (j > 0 && !vertical(i, j - 1)) return false;
  if (j < ny_ && !vertical(i, j)) return false;
  return true;
}

DiscreteCrackMask rasterize_polyline(std::span<const Point> polyline, const Domain& domain) {
  DiscreteCrackMask mask = DiscreteCrackMask::empty(domain);
  const double h = domain.h();
  const int nx = domain.nx(), ny = domain.ny();
  const double tol = 1e-12 * std::max(1.0, h);

  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    const Point& a = polyline[k];
    const Point& b = polyline[k + 1];
    const auto lo_i = std::clamp(static_cast<int>(std::floor((std::min(a.x(), b.x()) - domain.x_min()) / h)) - 1, 0, nx);
    const auto hi_i = std::clamp(static_cast<int>(std::ceil((std::max(a.x(), b.x()) - domain.x_min()) / h)) + 1, 0, nx);
    const auto lo_j = std::clamp(static_cast<int>(std::floor((std::min(a.y(), b.y()) - domain.y_min()) / h)) - 1, 0, ny);
    const auto hi_j = std::clamp(static_cast<int>(std::ceil((std::max(a.y(), b.y()) - domain.y_min()) / h)) + 1, 0, ny);
    for (int j = lo_j; j <= hi_j; ++j) {
      for (int i = lo_i; i <= hi_i; ++i) {
        const Point p = domain.position(i, j);
        if (i < nx && !mask.horizontal(i, j) && segments_meet(p, domain.position(i + 1, j), a, b, tol))
          mask.sever_horizontal(i, j);
        if (j < ny && !mask.vertical(i, j) && segments_meet(p, domain.position(i, j + 1), a, b, tol))
          mask.sever_vertical(i, j);
      }
    }
  }
  return mask;
}

DiscreteCrackMask rasterize_crack(const Crack& crack, const Domain& domain, int depth, RasterOptions options) {
  if (depth < 1) throw DomainError("rasterization depth must be >= 1");
  if (options.enforce_coupling) {
    const double segment = std::pow(crack.curve().ratio(), depth);
    if (segment > domain.h() * (1.0 + 1e-12))
      throw CouplingError(fmt::format("depth {} gives prefractal segments {} longer than h = {}", depth, segment,
                                      domain.h()));
  }
  const auto pts = sample(crack, depth);
  for (const auto& p : pts)
    if (!domain.contains(p)) throw GeometryError(fmt::format("crack point ({}, {}) lies outside the domain", p.x(), p.y()));

  auto mask = rasterize_polyline(pts, domain);
  mask.set_source(crack.hash(), depth);
  return mask;
}

}  // namespace fracgrowth
