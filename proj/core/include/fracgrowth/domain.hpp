#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "fracgrowth/fractal_curve.hpp"

namespace fracgrowth {

enum class Side { bottom, right, top, left };

std::string_view to_string(Side side);
Side side_from_string(std::string_view name);

/// Closed interval [from, to] of one side, measured in the coordinate that
/// runs along it (x for bottom/top, y for left/right).
struct BoundaryPart {
  Side side = Side::bottom;
  double from = 0.0;
  double to = 0.0;
  bool operator==(const BoundaryPart&) const = default;
};

/// Rectangle [x_min, x_max] x [y_min, y_max] discretized by a regular grid
/// of step h, with node (i, j) at (x_min + i h, y_min + j h).
class Domain {
 public:
  /// Throws ValidationError unless h divides both side lengths, and the
  /// Dirichlet and Neumann parts cover the boundary with disjoint interiors.
  Domain(double x_min, double x_max, double y_min, double y_max, double h,
         std::vector<BoundaryPart> dirichlet, std::vector<BoundaryPart> neumann);

  /// Unit square with the given step and the whole boundary Dirichlet.
  static Domain unit_square(double h);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }
  double h() const noexcept { return h_; }
  double area() const noexcept { return (x_max_ - x_min_) * (y_max_ - y_min_); }

  /// Number of cells along x and y.
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1);
  }
  std::size_t node(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_ + 1) + static_cast<std::size_t>(i);
  }
  int node_i(std::size_t n) const noexcept { return static_cast<int>(n % static_cast<std::size_t>(nx_ + 1)); }
  int node_j(std::size_t n) const noexcept { return static_cast<int>(n / static_cast<std::size_t>(nx_ + 1)); }
  Point position(int i, int j) const noexcept { return {x_min_ + i * h_, y_min_ + j * h_}; }

  bool contains(const Point& p, double tol = 1e-12) const;

  /// Node lies on a Dirichlet part (before any crack release).
  bool on_dirichlet(int i, int j) const;

  const std::vector<BoundaryPart>& dirichlet_parts() const noexcept { return dirichlet_; }
  const std::vector<BoundaryPart>& neumann_parts() const noexcept { return neumann_; }

 private:
  double x_min_, x_max_, y_min_, y_max_, h_;
  int nx_ = 0, ny_ = 0;
  std::vector<BoundaryPart> dirichlet_, neumann_;
  std::vector<unsigned char> dirichlet_node_;
};

}  // namespace fracgrowth
