#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracgrowth/crack_family.hpp"
#include "fracgrowth/domain.hpp"
#include "fracgrowth/elastic_solver.hpp"
#include "fracgrowth/evolution.hpp"

namespace fracgrowth {

struct ConvergenceRecord {
  int depth = 0;
  double hausdorff_to_finest = 0.0;
  double energy = 0.0;
  /// sum over cells of |grad u_d - grad u_D|^p h^2.
  double gradient_distance = 0.0;
  std::size_t severed_edges = 0;
};

/// The finest depth stands in for the limit crack.
struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
  int finest_depth = 0;
  double p = 2.0;

  /// Gradient distance strictly decreasing over every depth below the finest.
  bool gradient_distance_strictly_decreasing() const;
  /// |E(d) - E(D)| non-increasing in d.
  bool energy_gap_decreasing() const;
};

/// Solves the static problem with datum w0 (load factor 1) on the common
/// grid for the depth-d polyline of `crack`, d in `depths` (increasing),
/// and compares each level with the finest one. Rasterization skips the
/// coupling rule since the grid stays fixed while the depth grows; the
/// coarsest depth must still have cells no smaller than h.
ConvergenceReport minimizer_convergence_study(const Crack& crack, const Physics& physics, const Domain& domain,
                                              std::span<const int> depths, const SolverSettings& settings = {});

struct ContentRow {
  int depth = 0;
  std::vector<std::size_t> counts;
  std::vector<double> content;
  /// Content ratio per factor 3 decrease in eps, fitted over the eps values
  /// below the row's segment length (all eps for the deep row).
  double ratio_per_third = 0.0;
};

struct SemicontinuityReport {
  std::vector<double> eps;
  double alpha = 0.0;
  std::vector<ContentRow> rows;
  ContentRow deep;
  /// Smallest deep-row content over the resolved eps range.
  double deep_floor = 0.0;
  /// Largest ratio between successive deep-row contents (and its inverse).
  double deep_ratio_min = 0.0;
  double deep_ratio_max = 0.0;
};

/// alpha_content of densified prefractal(n) for each n in `depths`, plus
/// the same for prefractal(deep_depth).
SemicontinuityReport semicontinuity_demo(const AlphaCurve& curve, std::span<const int> depths,
                                         std::span<const double> eps_list, double alpha, int deep_depth = 10);

}  // namespace fracgrowth
