#include "fracgrowth/fractal_curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

constexpr double kMoranTolerance = 1e-12;
constexpr double kJoinTolerance = 1e-12;

std::uint64_t ipow(std::uint64_t base, int exponent) {
  std::uint64_t r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

// Index of the depth-level cell whose left endpoint is the largest junction
// not exceeding s; equals k^depth only for s == ell.
std::uint64_t cell_index(const AlphaCurve& curve, double s, int depth) {
  const auto n = curve.cell_count(depth);
  const double x = s / curve.ell() * static_cast<double>(n);
  const double nearest = std::nearbyint(x);
  const double snap = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x);
  const double v = std::abs(x - nearest) <= snap ? nearest : std::floor(x);
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(0.0, v)), n);
}

double pairwise_diameter(std::span<const Point> pts) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d2 = std::max(d2, (pts[i] - pts[j]).squaredNorm());
  return std::sqrt(d2);
}

}  // namespace

Point SimilarityMap::apply(const Point& p) const {
  const double c = std::cos(angle), s = std::sin(angle);
  return {ratio * (c * p.x() - s * p.y()) + tx, ratio * (s * p.x() + c * p.y()) + ty};
}

AlphaCurve AlphaCurve::from_ifs(std::vector<SimilarityMap> maps, double alpha, double ell,
                                std::string kind) {
  if (maps.size() < 2) throw ValidationError("IFS needs at least two maps");
  if (!(alpha > 1.0 && alpha < 2.0))
    throw ValidationError(fmt::format("alpha = {} outside (1, 2)", alpha));
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ValidationError("ell must be positive");

  const double r = maps.front().ratio;
  for (const auto& m : maps) {
    if (!(m.ratio > 0.0 && m.ratio < 1.0)) throw ValidationError("map ratio outside (0, 1)");
    if (std::abs(m.ratio - r) > 1e-12) throw ValidationError("only equal-ratio IFSs are accepted");
  }

  double moran = 0.0;
  for (const auto& m : maps) moran += std::pow(m.ratio, alpha);
  if (std::abs(moran - 1.0) > kMoranTolerance)
    throw ValidationError(fmt::format("Moran sum {} differs from 1", moran));

  const Point origin{0.0, 0.0}, unit{1.0, 0.0};
  if ((maps.front().apply(origin) - origin).norm() > kJoinTolerance)
    throw ValidationError("first map must fix the origin");
  if ((maps.back().apply(unit) - unit).norm() > kJoinTolerance)
    throw ValidationError("last map must fix (1, 0)");
  for (std::size_t i = 0; i + 1 < maps.size(); ++i) {
    if ((maps[i].apply(unit) - maps[i + 1].apply(origin)).norm() > kJoinTolerance)
      throw ValidationError(fmt::format("maps {} and {} are not joined end to end", i, i + 1));
  }

  AlphaCurve curve;
  curve.maps_ = std::move(maps);
  curve.alpha_ = alpha;
  curve.ell_ = ell;
  curve.kind_ = std::move(kind);
  if (curve.kind_ == "koch") {
    curve.diameter_ = 1.0;
  } else {
    // Vertices of a prefractal lie on the attractor, and every point of the
    // attractor is within one cell diameter of a vertex.
    int level = 0;
    while (ipow(curve.branching(), level + 1) <= 2048) ++level;
    const double rl = std::pow(r, level);
    curve.diameter_ = pairwise_diameter(prefractal(curve, level)) / std::max(1.0 - 2.0 * rl, 0.5);
  }
  return curve;
}

double AlphaCurve::cell_diameter(int depth) const { return diameter_ * std::pow(ratio(), depth); }

std::uint64_t AlphaCurve::cell_count(int depth) const {
  if (depth < 0) throw DomainError("depth must be non-negative");
  const double bits = depth * std::log2(static_cast<double>(branching()));
  if (bits > 52.0) throw DomainError(fmt::format("depth {} exceeds the representable address range", depth));
  return ipow(branching(), depth);
}

double AlphaCurve::junction_parameter(std::uint64_t m, int depth) const {
  const auto n = cell_count(depth);
  if (m == n) return ell_;
  return static_cast<double>(m) / static_cast<double>(n) * ell_;
}

AlphaCurve AlphaCurve::with_holder_constants(double c, double C) const {
  if (!(c > 0.0) || !(C >= c)) throw ValidationError("need 0 < holder_c <= holder_C");
  AlphaCurve copy = *this;
  copy.holder_c_ = c;
  copy.holder_C_ = C;
  return copy;
}

bool AlphaCurve::same_geometry(const AlphaCurve& other) const {
  return maps_ == other.maps_ && alpha_ == other.alpha_ && ell_ == other.ell_;
}

std::vector<SimilarityMap> koch_maps() {
  const double third = 1.0 / 3.0;
  const double pi3 = std::numbers::pi / 3.0;
  return {
      {third, 0.0, 0.0, 0.0},
      {third, pi3, third, 0.0},
      {third, -pi3, 0.5, std::sqrt(3.0) / 6.0},
      {third, 0.0, 2.0 * third, 0.0},
  };
}

AlphaCurve koch_curve(int depth_hint) {
  if (depth_hint < 0) throw DomainError("depth_hint must be non-negative");
  auto maps = koch_maps();
  auto curve = AlphaCurve::from_ifs(std::move(maps), std::log(4.0) / std::log(3.0), 1.0, "koch");
  const auto est = estimate_holder_constants(curve, std::max(depth_hint, 2), 4096, 0);
  return curve.with_holder_constants(est.c_est, est.C_est);
}

Point evaluate(const AlphaCurve& curve, double s, int depth) {
  if (depth < 1) throw DomainError("evaluate needs depth >= 1");
  if (!(s >= 0.0 && s <= curve.ell()))
    throw DomainError(fmt::format("parameter {} outside [0, {}]", s, curve.ell()));

  const auto k = curve.branching();
  const auto n = curve.cell_count(depth);
  auto m = cell_index(curve, s, depth);
  const auto maps = curve.maps();

  // Compose innermost first so the result is bit-identical to prefractal().
  if (m == n) {
    Point p{1.0, 0.0};
    for (int d = 0; d < depth; ++d) p = maps[k - 1].apply(p);
    return p;
  }
  std::vector<std::size_t> digits(static_cast<std::size_t>(depth));
  for (int d = depth - 1; d >= 0; --d) {
    digits[static_cast<std::size_t>(d)] = static_cast<std::size_t>(m % k);
    m /= k;
  }
  Point p{0.0, 0.0};
  for (int d = depth - 1; d >= 0; --d) p = maps[digits[static_cast<std::size_t>(d)]].apply(p);
  return p;
}

std::vector<Point> prefractal(const AlphaCurve& curve, int n) {
  if (n < 0) throw DomainError("prefractal level must be non-negative");
  (void)curve.cell_count(n);
  std::vector<Point> level{Point{0.0, 0.0}, Point{1.0, 0.0}};
  for (int l = 0; l < n; ++l) {
    std::vector<Point> next;
    next.reserve((level.size() - 1) * curve.branching() + 1);
    for (const auto& map : curve.maps())
      for (std::size_t j = 0; j + 1 < level.size(); ++j) next.push_back(map.apply(level[j]));
    next.push_back(curve.maps().back().apply(level.back()));
    level = std::move(next);
  }
  return level;
}

HolderEstimate estimate_holder_constants(const AlphaCurve& curve, int depth,
                                         std::size_t pair_budget, std::uint64_t seed) {
  if (depth < 2) throw DomainError("Hölder estimation needs depth >= 2");
  if (pair_budget < 1) throw DomainError("pair_budget must be >= 1");

  const double inv_alpha = 1.0 / curve.alpha();
  const auto pts = prefractal(curve, depth);
  const std::size_t n = pts.size() - 1;

  std::vector<double> scale(n + 1);
  for (std::size_t m = 1; m <= n; ++m)
    scale[m] = std::pow(static_cast<double>(m) / static_cast<double>(n) * curve.ell(), inv_alpha);

  HolderEstimate est{std::numeric_limits<double>::infinity(), 0.0, 0};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double ratio = (pts[i] - pts[j]).norm() / scale[j - i];
      est.c_est = std::min(est.c_est, ratio);
      est.C_est = std::max(est.C_est, ratio);
    }
  }
  est.pairs = pts.size() * (pts.size() - 1) / 2;

  const int fine = depth + 4;
  const auto nf = curve.cell_count(fine);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, nf);
  for (std::size_t b = 0; b < pair_budget; ++b) {
    const auto m1 = pick(rng);
    const auto m2 = pick(rng);
    if (m1 == m2) continue;
    const double s1 = curve.junction_parameter(m1, fine);
    const double s2 = curve.junction_parameter(m2, fine);
    const double ratio = (evaluate(curve, s1, fine) - evaluate(curve, s2, fine)).norm() /
                         std::pow(std::abs(s1 - s2), inv_alpha);
    est.c_est = std::min(est.c_est, ratio);
    est.C_est = std::max(est.C_est, ratio);
    ++est.pairs;
  }
  return est;
}

double measure_of_arc(const AlphaCurve& curve, double s1, double s2) {
  if (!(s1 >= 0.0 && s2 <= curve.ell()))
    throw DomainError("arc parameters outside [0, ell]");
  if (s1 > s2) throw DomainError("measure_of_arc needs s1 <= s2");
  return s2 - s1;
}

double moran_sum(const AlphaCurve& curve) {
  double sum = 0.0;
  for (const auto& m : curve.maps()) sum += std::pow(m.ratio, curve.alpha());
  return sum;
}

}  // namespace fracgrowth
