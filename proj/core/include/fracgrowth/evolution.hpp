#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "fracgrowth/crack_family.hpp"
#include "fracgrowth/domain.hpp"
#include "fracgrowth/elastic_solver.hpp"
#include "fracgrowth/field.hpp"
#include "fracgrowth/material.hpp"

namespace fracgrowth {

struct LoadKnot {
  double t = 0.0;
  double lambda = 0.0;
  bool operator==(const LoadKnot&) const = default;
};

/// Piecewise-linear load factor lambda(t) on [0, T]; the boundary datum at
/// time t is lambda(t) w0.
class LoadProgram {
 public:
  /// Knots must start at t = 0 and increase strictly.
  explicit LoadProgram(std::vector<LoadKnot> knots);
  static LoadProgram ramp(double T, double lambda_end);
  static LoadProgram constant(double T, double value);

  double T() const noexcept { return knots_.back().t; }
  double lambda(double t) const;
  const std::vector<LoadKnot>& knots() const noexcept { return knots_; }
  bool operator==(const LoadProgram&) const = default;

 private:
  std::vector<LoadKnot> knots_;
};

struct ScalarPhysics {
  Integrand integrand = Integrand::quadratic();
  Polynomial2 w0;
};

struct PlanarPhysics {
  ElasticityTensor tensor{0.0, 1.0};
  Polynomial2 w0x, w0y;
};

using Physics = std::variant<ScalarPhysics, PlanarPhysics>;

/// Interpolant of lambda w0 on the given mask.
Field datum_field(const Physics& physics, const Domain& domain, const DiscreteCrackMask& mask, double lambda);
Solution solve_static(const Physics& physics, const Domain& domain, const DiscreteCrackMask& mask,
                      const Field& datum, const SolverSettings& settings, const Field* initial = nullptr);
double elastic_energy(const Field& u, const Physics& physics);
double work_rate(const Field& u, const Field& wdot, const Physics& physics);

/// Koch curve certified once per process (Hölder constants at depth 6).
std::shared_ptr<const AlphaCurve> shared_koch_curve();
/// Koch family member with zero perturbation and tip 0.
Crack koch_family(Point origin = {0.0, 0.0}, Orientation rotation = {});

struct EvolutionConfig {
  Domain domain = Domain::unit_square(1.0 / 16.0);
  /// Frozen family; its own tip is ignored in favour of a0.
  Crack family = koch_family();
  double delta_a = 1.0 / 16.0;
  int steps = 8;
  double a0 = 0.0;
  LoadProgram load = LoadProgram::ramp(1.0, 1.0);
  Physics physics = ScalarPhysics{};
  SolverSettings solver;
  int raster_depth = 3;
  bool enforce_coupling = true;
  /// Optional non-uniform partition 0 = t_0 < ... < t_n = T; empty means
  /// uniform with `steps` intervals.
  std::vector<double> times;
  int threads = 1;
  /// Evaluate candidates in descending tip order (the argmin is unchanged).
  bool reverse_candidate_order = false;
  double stability_tolerance = 2e-9;
};

/// Tip grid a0, a0 + da, ..., ell.
std::vector<double> tip_grid(const EvolutionConfig& config);
std::vector<double> time_grid(const EvolutionConfig& config);

/// Throws ValidationError on an inconsistent config or when the initial
/// state (static minimizer at t = 0 with tip a0) is not globally stable over
/// the tip grid.
void validate_config(const EvolutionConfig& config);

struct StepState {
  std::size_t tip_index = 0;
  double a = 0.0;
  Field u;
  double elastic = 0.0;
  long solver_iters = 0;
};

/// Context reused across steps: the tip grid and one mask per tip.
class CandidateSet {
 public:
  explicit CandidateSet(const EvolutionConfig& config);
  const std::vector<double>& tips() const noexcept { return tips_; }
  const DiscreteCrackMask& mask(std::size_t k) const { return masks_.at(k); }
  std::size_t size() const noexcept { return tips_.size(); }

 private:
  std::vector<double> tips_;
  std::vector<DiscreteCrackMask> masks_;
};

/// Minimizes elastic + a over candidate tips with index >= from_index at
/// load lambda; ties go to the smallest tip. Throws StepError(step) if any
/// candidate solve fails.
StepState incremental_step(const EvolutionConfig& config, const CandidateSet& candidates, std::size_t from_index,
                           double lambda, int step = 0);

struct EvolutionRecord {
  int i = 0;
  double t = 0.0;
  double lambda = 0.0;
  double a = 0.0;
  double E_elastic = 0.0;
  double E_surface = 0.0;
  double E_total = 0.0;
  double work_cum = 0.0;
  long solver_iters = 0;
  bool operator==(const EvolutionRecord&) const = default;
};

struct EvolutionTrace {
  std::vector<EvolutionRecord> records;
  bool operator==(const EvolutionTrace&) const = default;
};

/// Incremental minimization over the time partition. The cumulative work
/// adds work_rate(u_{i-1}, w0) (lambda_i - lambda_{i-1}) per step, with the
/// start-of-interval state.
EvolutionTrace run_evolution(const EvolutionConfig& config);

/// Recomputes elastic(a(t)) + a(t) at record t_index and returns the
/// larger of (that value minus the minimum over candidate tips >= a(t)) and
/// the mismatch with the recorded total energy.
/// Records whose tip is off the grid give +infinity.
double audit_stability(const EvolutionTrace& trace, const EvolutionConfig& config, std::size_t t_index);
double audit_stability(const EvolutionTrace& trace, const EvolutionConfig& config, std::size_t t_index,
                       const CandidateSet& candidates);

struct EnergyBalanceReport {
  double residual = 0.0;
  /// E_tot(t_i) - E_tot(0) - work_cum(t_i) per record.
  std::vector<double> defect;
  /// Smallest C with defect_i <= C dt for every record.
  double constant = 0.0;
};

EnergyBalanceReport audit_energy_balance(const EvolutionTrace& trace);

/// Checks of the trace alone: a non-decreasing, E_surface == a and
/// E_total == E_elastic + E_surface exactly. Returns the first failing
/// record index.
std::optional<std::size_t> audit_bookkeeping(const EvolutionTrace& trace);

/// Smallest load factor (to `tol`) in [0, lambda_hi] at which some tip
/// beyond a0 strictly beats a0 under the datum lambda w0. Returns nullopt
/// if no crossover happens below lambda_hi.
std::optional<double> crossover_load(const EvolutionConfig& config, double lambda_hi, double tol = 1e-10);

}  // namespace fracgrowth
