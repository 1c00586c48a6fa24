#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/domain.hpp"

namespace fracgrowth {

/// Quadratic polynomial c + x X + y Y + xx X^2 + xy X Y + yy Y^2, used as a
/// boundary datum component.
struct Polynomial2 {
  double c = 0.0, x = 0.0, y = 0.0, xx = 0.0, xy = 0.0, yy = 0.0;

  double operator()(const Point& p) const {
    return c + x * p.x() + y * p.y() + xx * p.x() * p.x() + xy * p.x() * p.y() + yy * p.y() * p.y();
  }
  Polynomial2 scaled(double s) const { return {s * c, s * x, s * y, s * xx, s * xy, s * yy}; }
  bool operator==(const Polynomial2&) const = default;
};

/// Nodal values (1 or 2 components per node, interleaved) on a Domain grid
/// together with the crack mask the values live on.
class Field {
 public:
  Field(Domain domain, DiscreteCrackMask mask, int components, std::vector<double> values);
  static Field zeros(const Domain& domain, const DiscreteCrackMask& mask, int components);

  const Domain& domain() const noexcept { return domain_; }
  const DiscreteCrackMask& mask() const noexcept { return mask_; }
  int components() const noexcept { return components_; }

  double operator()(std::size_t node, int component = 0) const {
    return values_[node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(component)];
  }
  double& operator()(std::size_t node, int component = 0) {
    return values_[node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(component)];
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  Field scaled(double s) const;
  Field with_mask(const DiscreteCrackMask& mask) const;

 private:
  Domain domain_;
  DiscreteCrackMask mask_;
  int components_;
  std::vector<double> values_;
};

/// Nodal interpolant of a scalar datum.
Field interpolate(const Domain& domain, const DiscreteCrackMask& mask, const Polynomial2& w);
/// Nodal interpolant of a vector datum (w_x, w_y).
Field interpolate(const Domain& domain, const DiscreteCrackMask& mask, const Polynomial2& wx, const Polynomial2& wy);

}  // namespace fracgrowth
