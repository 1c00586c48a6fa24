#include "fracgrowth/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/errors.hpp"
#include "fracgrowth/geometry.hpp"

namespace fracgrowth {

bool ConvergenceReport::gradient_distance_strictly_decreasing() const {
  for (std::size_t k = 1; k + 1 < records.size(); ++k)
    if (!(records[k].gradient_distance < records[k - 1].gradient_distance)) return false;
  return true;
}

bool ConvergenceReport::energy_gap_decreasing() const {
  if (records.empty()) return true;
  const double finest = records.back().energy;
  for (std::size_t k = 1; k < records.size(); ++k)
    if (std::abs(records[k].energy - finest) > std::abs(records[k - 1].energy - finest)) return false;
  return true;
}

ConvergenceReport minimizer_convergence_study(const Crack& crack, const Physics& physics, const Domain& domain,
                                              std::span<const int> depths, const SolverSettings& settings) {
  if (depths.empty()) throw ValidationError("convergence study needs at least one depth");
  for (std::size_t k = 0; k < depths.size(); ++k) {
    if (depths[k] < 0) throw ValidationError("depths must be non-negative");
    if (k > 0 && depths[k] <= depths[k - 1]) throw ValidationError("depths must increase strictly");
  }
  if (std::pow(crack.curve().ratio(), depths.front()) < domain.h() * (1.0 - 1e-12))
    throw PreconditionError("the coarsest depth is already finer than the grid");

  ConvergenceReport report;
  report.finest_depth = depths.back();
  if (const auto* s = std::get_if<ScalarPhysics>(&physics)) report.p = s->integrand.p();

  const RasterOptions options{false};
  std::vector<Solution> solutions;
  std::vector<std::vector<Point>> samples;
  for (int d : depths) {
    const auto mask = rasterize_crack(crack, domain, d, options);
    solutions.push_back(solve_static(physics, domain, mask, datum_field(physics, domain, mask, 1.0), settings));
    samples.push_back(sample(crack, d));
  }
  const auto& finest = solutions.back();
  for (std::size_t k = 0; k < depths.size(); ++k) {
    ConvergenceRecord r;
    r.depth = depths[k];
    r.hausdorff_to_finest = hausdorff_distance(samples[k], samples.back());
    r.energy = solutions[k].energy;
    r.gradient_distance = gradient_distance(solutions[k].field, finest.field, report.p);
    r.severed_edges = solutions[k].field.mask().severed_count();
    report.records.push_back(r);
  }
  return report;
}

namespace {

double fitted_ratio_per_third(std::span<const double> eps, std::span<const double> content) {
  // Least-squares slope of log content against log eps.
  const std::size_t n = eps.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(eps[k]), y = std::log(content[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(-slope * std::log(3.0));
}

ContentRow content_row(std::span<const Point> points, int depth, std::span<const double> eps, double alpha,
                       double segment_length) {
  ContentRow row;
  row.depth = depth;
  std::vector<double> tail_eps, tail_content;
  for (double e : eps) {
    const auto n = box_count(points, e);
    row.counts.push_back(n);
    row.content.push_back(static_cast<double>(n) * std::pow(e, alpha));
    if (e <= segment_length * (1.0 + 1e-12)) {
      tail_eps.push_back(e);
      tail_content.push_back(row.content.back());
    }
  }
  row.ratio_per_third = fitted_ratio_per_third(tail_eps, tail_content);
  return row;
}

}  // namespace

SemicontinuityReport semicontinuity_demo(const AlphaCurve& curve, std::span<const int> depths,
                                         std::span<const double> eps_list, double alpha, int deep_depth) {
  if (eps_list.empty()) throw ValidationError("eps list is empty");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  for (double e : eps_list)
    if (!(e > 0.0)) throw DomainError("eps must be positive");

  SemicontinuityReport report;
  report.eps.assign(eps_list.begin(), eps_list.end());
  report.alpha = alpha;
  const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
  const double r = curve.ratio();

  for (int n : depths) {
    const auto poly = prefractal(curve, n);
    const auto dense = densify(poly, eps_min / 4.0);
    // Fit only eps at least a third below the segment length.
    const double segment = curve.diameter() * std::pow(r, n + 1);
    report.rows.push_back(content_row(dense, n, eps_list, alpha, segment));
  }

  const auto deep_points = prefractal(curve, deep_depth);
  report.deep = content_row(deep_points, deep_depth, eps_list, alpha, std::numeric_limits<double>::infinity());
  const double resolution = sampling_resolution(deep_points);
  report.deep_floor = std::numeric_limits<double>::infinity();
  report.deep_ratio_min = std::numeric_limits<double>::infinity();
  report.deep_ratio_max = 0.0;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (eps_list[k] <= resolution) continue;
    report.deep_floor = std::min(report.deep_floor, report.deep.content[k]);
    if (k > 0 && eps_list[k - 1] > resolution) {
      const double q = report.deep.content[k] / report.deep.content[k - 1];
      report.deep_ratio_min = std::min(report.deep_ratio_min, q);
      report.deep_ratio_max = std::max(report.deep_ratio_max, q);
    }
  }
  return report;
}

}  // namespace fracgrowth
