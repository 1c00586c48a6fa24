#include "fracgrowth/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

constexpr double kCoverTolerance = 1e-9;

int divide_exactly(double length, double h, const char* what) {
  const double q = length / h;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 1e-9 * std::max(1.0, q))
    throw ValidationError(fmt::format("grid step {} does not divide the {} length {}", h, what, length));
  return static_cast<int>(n);
}

}  // namespace

std::string_view to_string(Side side) {
  switch (side) {
    case Side::bottom: return "bottom";
    case Side::right: return "right";
    case Side::top: return "top";
    case Side::left: return "left";
  }
  return "bottom";
}

Side side_from_string(std::string_view name) {
  if (name == "bottom") return Side::bottom;
  if (name == "right") return Side::right;
  if (name == "top") return Side::top;
  if (name == "left") return Side::left;
  throw ValidationError(fmt::format("unknown side '{}'", name));
}

Domain::Domain(double x_min, double x_max, double y_min, double y_max, double h,
               std::vector<BoundaryPart> dirichlet, std::vector<BoundaryPart> neumann)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), h_(h),
      dirichlet_(std::move(dirichlet)), neumann_(std::move(neumann)) {
  if (!(x_max > x_min) || !(y_max > y_min)) throw ValidationError("domain rectangle is empty");
  if (!(h > 0.0)) throw ValidationError("grid step must be positive");
  nx_ = divide_exactly(x_max - x_min, h, "x");
  ny_ = divide_exactly(y_max - y_min, h, "y");

  // Per side: Dirichlet and Neumann intervals together cover the side, and
  // distinct intervals overlap at most in an endpoint.
  for (Side side : {Side::bottom, Side::right, Side::top, Side::left}) {
    const bool horizontal = side == Side::bottom || side == Side::top;
    const double lo = horizontal ? x_min : y_min;
    const double hi = horizontal ? x_max : y_max;
    std::vector<std::pair<double, double>> parts;
    for (const auto* list : {&dirichlet_, &neumann_})
      for (const auto& p : *list)
        if (p.side == side) {
          if (!(p.to >= p.from)) throw ValidationError("boundary part with to < from");
          if (p.from < lo - kCoverTolerance || p.to > hi + kCoverTolerance)
            throw ValidationError(fmt::format("boundary part on {} leaves the side", to_string(side)));
          parts.emplace_back(p.from, p.to);
        }
    std::sort(parts.begin(), parts.end());
    double reached = lo;
    for (const auto& [a, b] : parts) {
      if (a > reached + kCoverTolerance)
        throw ValidationError(fmt::format("boundary side {} not covered near {}", to_string(side), reached));
      if (a < reached - kCoverTolerance)
        throw ValidationError(fmt::format("boundary parts on {} overlap", to_string(side)));
      reached = std::max(reached, b);
    }
    if (reached < hi - kCoverTolerance)
      throw ValidationError(fmt::format("boundary side {} not covered near {}", to_string(side), reached));
  }

  dirichlet_node_.assign(node_count(), 0);
  const auto mark = [&](int i, int j) { dirichlet_node_[node(i, j)] = 1; };
  for (const auto& p : dirichlet_) {
    const bool horizontal = p.side == Side::bottom || p.side == Side::top;
    const double origin = horizontal ? x_min_ : y_min_;
    const int count = horizontal ? nx_ : ny_;
    for (int k = 0; k <= count; ++k) {
      const double t = origin + k * h_;
      if (t < p.from - kCoverTolerance || t > p.to + kCoverTolerance) continue;
      switch (p.side) {
        case Side::bottom: mark(k, 0); break;
        case Side::top: mark(k, ny_); break;
        case Side::left: mark(0, k); break;
        case Side::right: mark(nx_, k); break;
      }
    }
  }
}

Domain Domain::unit_square(double h) {
  std::vector<BoundaryPart> d{{Side::bottom, 0.0, 1.0}, {Side::right, 0.0, 1.0},
                              {Side::top, 0.0, 1.0}, {Side::left, 0.0, 1.0}};
  return Domain(0.0, 1.0, 0.0, 1.0, h, std::move(d), {});
}

bool Domain::contains(const Point& p, double tol) const {
  return p.x() >= x_min_ - tol && p.x() <= x_max_ + tol && p.y() >= y_min_ - tol && p.y() <= y_max_ + tol;
}

bool Domain::on_dirichlet(int i, int j) const { return dirichlet_node_[node(i, j)] != 0; }

}  // namespace fracgrowth
