#include "fracgrowth/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) fn(k);
    });
  for (auto& t : pool) t.join();
}

struct CandidateResult {
  std::optional<Solution> solution;
  std::exception_ptr error;
};

// Solves every candidate k >= from at load lambda. Results are indexed by
// k - from regardless of evaluation order.
std::vector<CandidateResult> solve_candidates(const EvolutionConfig& config, const CandidateSet& candidates,
                                              std::size_t from, double lambda) {
  const std::size_t count = candidates.size() - from;
  std::vector<CandidateResult> out(count);
  parallel_for(count, config.threads, [&](std::size_t slot) {
    const std::size_t k = config.reverse_candidate_order ? candidates.size() - 1 - slot : from + slot;
    auto& r = out[k - from];
    try {
      const auto& mask = candidates.mask(k);
      r.solution = solve_static(config.physics, config.domain, mask,
                                datum_field(config.physics, config.domain, mask, lambda), config.solver);
    } catch (...) {
      r.error = std::current_exception();
    }
  });
  return out;
}

bool strictly_better(double candidate, double best) {
  return candidate < best - 1e-12 * std::max(1.0, std::abs(best));
}

}  // namespace

LoadProgram::LoadProgram(std::vector<LoadKnot> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw ValidationError("load program needs at least two knots");
  if (knots_.front().t != 0.0) throw ValidationError("load program must start at t = 0");
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    if (!std::isfinite(knots_[k].t) || !std::isfinite(knots_[k].lambda))
      throw ValidationError("load program knots must be finite");
    if (k > 0 && !(knots_[k].t > knots_[k - 1].t)) throw ValidationError("load program times must increase strictly");
  }
}

LoadProgram LoadProgram::ramp(double T, double lambda_end) { return LoadProgram({{0.0, 0.0}, {T, lambda_end}}); }

LoadProgram LoadProgram::constant(double T, double value) { return LoadProgram({{0.0, value}, {T, value}}); }

double LoadProgram::lambda(double t) const {
  if (t <= knots_.front().t) return knots_.front().lambda;
  if (t >= knots_.back().t) return knots_.back().lambda;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double v, const LoadKnot& k) { return v < k.t; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.lambda + w * (hi.lambda - lo.lambda);
}

Field datum_field(const Physics& physics, const Domain& domain, const DiscreteCrackMask& mask, double lambda) {
  if (const auto* s = std::get_if<ScalarPhysics>(&physics)) return interpolate(domain, mask, s->w0.scaled(lambda));
  const auto& p = std::get<PlanarPhysics>(physics);
  return interpolate(domain, mask, p.w0x.scaled(lambda), p.w0y.scaled(lambda));
}

Solution solve_static(const Physics& physics, const Domain& domain, const DiscreteCrackMask& mask,
                      const Field& datum, const SolverSettings& settings, const Field* initial) {
  if (const auto* s = std::get_if<ScalarPhysics>(&physics))
    return solve_scalar(domain, mask, s->integrand, datum, settings, initial);
  return solve_planar(domain, mask, std::get<PlanarPhysics>(physics).tensor, datum, settings, initial);
}

double elastic_energy(const Field& u, const Physics& physics) {
  if (const auto* s = std::get_if<ScalarPhysics>(&physics)) return elastic_energy(u, s->integrand);
  return elastic_energy(u, std::get<PlanarPhysics>(physics).tensor);
}

double work_rate(const Field& u, const Field& wdot, const Physics& physics) {
  if (const auto* s = std::get_if<ScalarPhysics>(&physics)) return work_rate(u, wdot, s->integrand);
  return work_rate(u, wdot, std::get<PlanarPhysics>(physics).tensor);
}

std::shared_ptr<const AlphaCurve> shared_koch_curve() {
  static const auto curve = std::make_shared<const AlphaCurve>(koch_curve(6));
  return curve;
}

Crack koch_family(Point origin, Orientation rotation) {
  const auto curve = shared_koch_curve();
  return Crack(curve, Perturbation::zero(curve->ell()), rotation, 0.0, origin);
}

std::vector<double> tip_grid(const EvolutionConfig& config) {
  const double ell = config.family.curve().ell();
  if (!(config.delta_a > 0.0) || !std::isfinite(config.delta_a)) throw ValidationError("delta_a must be positive");
  if (!(config.a0 >= 0.0 && config.a0 <= ell)) throw ValidationError("a0 must lie in [0, ell]");
  const double q = (ell - config.a0) / config.delta_a;
  const double m = std::round(q);
  if (std::abs(q - m) > 1e-9)
    throw ValidationError(fmt::format("delta_a = {} does not divide ell - a0 = {}", config.delta_a, ell - config.a0));
  const auto count = static_cast<std::size_t>(m);
  std::vector<double> tips(count + 1);
  for (std::size_t k = 0; k < count; ++k) tips[k] = config.a0 + static_cast<double>(k) * config.delta_a;
  tips[count] = count == 0 ? config.a0 : ell;
  return tips;
}

std::vector<double> time_grid(const EvolutionConfig& config) {
  if (config.steps < 1) throw ValidationError("steps must be at least 1");
  const double T = config.load.T();
  if (!config.times.empty()) {
    if (config.times.size() != static_cast<std::size_t>(config.steps) + 1)
      throw ValidationError("times must list steps + 1 instants");
    if (config.times.front() != 0.0 || config.times.back() != T)
      throw ValidationError("times must run from 0 to the load program's final time");
    for (std::size_t k = 1; k < config.times.size(); ++k)
      if (!(config.times[k] > config.times[k - 1])) throw ValidationError("times must increase strictly");
    return config.times;
  }
  std::vector<double> t(static_cast<std::size_t>(config.steps) + 1);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = T * static_cast<double>(k) / config.steps;
  t.back() = T;
  return t;
}

CandidateSet::CandidateSet(const EvolutionConfig& config) : tips_(tip_grid(config)) {
  masks_.reserve(tips_.size());
  const RasterOptions options{config.enforce_coupling};
  for (double a : tips_)
    masks_.push_back(rasterize_crack(config.family.with_tip(a), config.domain, config.raster_depth, options));
}

StepState incremental_step(const EvolutionConfig& config, const CandidateSet& candidates, std::size_t from_index,
                           double lambda, int step) {
  if (from_index >= candidates.size()) throw PreconditionError("previous tip is not on the tip grid");
  auto results = solve_candidates(config, candidates, from_index, lambda);
  std::optional<std::size_t> best;
  double best_energy = std::numeric_limits<double>::infinity();
  long iters = 0;
  for (std::size_t slot = 0; slot < results.size(); ++slot) {
    auto& r = results[slot];
    if (r.error) {
      try {
        std::rethrow_exception(r.error);
      } catch (const std::exception& e) {
        throw StepError(fmt::format("step {}: candidate a = {} failed: {}", step,
                                    candidates.tips()[from_index + slot], e.what()),
                        step);
      }
    }
    iters += r.solution->report.iterations;
    const double total = r.solution->energy + candidates.tips()[from_index + slot];
    if (!best || strictly_better(total, best_energy)) {
      best = slot;
      best_energy = total;
    }
  }
  const std::size_t k = from_index + *best;
  auto& sol = *results[*best].solution;
  return {k, candidates.tips()[k], std::move(sol.field), sol.energy, iters};
}

void validate_config(const EvolutionConfig& config) {
  if (config.threads < 1) throw ValidationError("threads must be at least 1");
  if (!(config.stability_tolerance >= 0.0)) throw ValidationError("stability_tolerance must be non-negative");
  if (std::holds_alternative<PlanarPhysics>(config.physics) && config.solver.linear_tolerance <= 0.0)
    throw ValidationError("linear_tolerance must be positive");
  const auto times = time_grid(config);
  const CandidateSet candidates(config);
  const double lambda0 = config.load.lambda(times.front());
  const auto results = solve_candidates(config, candidates, 0, lambda0);
  double initial = 0.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (results[k].error) std::rethrow_exception(results[k].error);
    const double total = results[k].solution->energy + candidates.tips()[k];
    if (k == 0) initial = total;
    best = std::min(best, total);
  }
  if (initial - best > config.stability_tolerance)
    throw ValidationError(
        fmt::format("initial state is not stable: total energy {} exceeds the candidate minimum {}", initial, best));
}

EvolutionTrace run_evolution(const EvolutionConfig& config) {
  validate_config(config);
  const auto times = time_grid(config);
  const CandidateSet candidates(config);

  EvolutionTrace trace;
  trace.records.reserve(times.size());
  double lambda_prev = config.load.lambda(times[0]);
  StepState state = [&] {
    const auto& mask = candidates.mask(0);
    auto sol = solve_static(config.physics, config.domain, mask,
                            datum_field(config.physics, config.domain, mask, lambda_prev), config.solver);
    return StepState{0, candidates.tips()[0], std::move(sol.field), sol.energy, sol.report.iterations};
  }();
  double work = 0.0;
  const auto push = [&](int i, double t, double lambda) {
    trace.records.push_back({i, t, lambda, state.a, state.elastic, state.a, state.elastic + state.a, work,
                             state.solver_iters});
  };
  push(0, times[0], lambda_prev);

  for (std::size_t i = 1; i < times.size(); ++i) {
    const double lambda = config.load.lambda(times[i]);
    const auto w0 = datum_field(config.physics, config.domain, state.u.mask(), 1.0);
    work += work_rate(state.u, w0, config.physics) * (lambda - lambda_prev);
    state = incremental_step(config, candidates, state.tip_index, lambda, static_cast<int>(i));
    push(static_cast<int>(i), times[i], lambda);
    lambda_prev = lambda;
  }
  return trace;
}

double audit_stability(const EvolutionTrace& trace, const EvolutionConfig& config, std::size_t t_index) {
  return audit_stability(trace, config, t_index, CandidateSet(config));
}

double audit_stability(const EvolutionTrace& trace, const EvolutionConfig& config, std::size_t t_index,
                       const CandidateSet& candidates) {
  const auto& rec = trace.records.at(t_index);
  const auto& tips = candidates.tips();
  const double ell = config.family.curve().ell();
  std::optional<std::size_t> k;
  for (std::size_t j = 0; j < tips.size(); ++j)
    if (std::abs(tips[j] - rec.a) <= 1e-12 * ell) k = j;
  if (!k) return std::numeric_limits<double>::infinity();

  const double lambda = config.load.lambda(rec.t);
  const auto results = solve_candidates(config, candidates, *k, lambda);
  double here = 0.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t slot = 0; slot < results.size(); ++slot) {
    if (results[slot].error) std::rethrow_exception(results[slot].error);
    const double total = results[slot].solution->energy + tips[*k + slot];
    if (slot == 0) here = total;
    best = std::min(best, total);
  }
  return std::max(here - best, std::abs(rec.E_total - here));
}

EnergyBalanceReport audit_energy_balance(const EvolutionTrace& trace) {
  EnergyBalanceReport out;
  if (trace.records.empty()) return out;
  const auto& first = trace.records.front();
  double dt = 0.0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    out.defect.push_back(r.E_total - first.E_total - r.work_cum);
    if (i > 0) dt = std::max(dt, r.t - trace.records[i - 1].t);
  }
  out.residual = std::abs(out.defect.back());
  if (dt > 0.0)
    for (double d : out.defect) out.constant = std::max(out.constant, d / dt);
  return out;
}

std::optional<std::size_t> audit_bookkeeping(const EvolutionTrace& trace) {
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.E_surface != r.a || r.E_total != r.E_elastic + r.E_surface) return i;
    if (i > 0 && r.a < trace.records[i - 1].a) return i;
  }
  return std::nullopt;
}

std::optional<double> crossover_load(const EvolutionConfig& config, double lambda_hi, double tol) {
  if (!(lambda_hi > 0.0)) throw ValidationError("lambda_hi must be positive");
  const CandidateSet candidates(config);
  if (candidates.size() < 2) return std::nullopt;
  const auto grows = [&](double lambda) {
    const auto results = solve_candidates(config, candidates, 0, lambda);
    double stay = 0.0, best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (results[k].error) std::rethrow_exception(results[k].error);
      const double total = results[k].solution->energy + candidates.tips()[k];
      if (k == 0)
        stay = total;
      else
        best = std::min(best, total);
    }
    return strictly_better(best, stay);
  };
  constexpr int scan = 32;
  double lo = 0.0, hi = -1.0;
  for (int s = 1; s <= scan; ++s) {
    const double lambda = lambda_hi * s / scan;
    if (grows(lambda)) {
      hi = lambda;
      break;
    }
    lo = lambda;
  }
  if (hi < 0.0) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (grows(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace fracgrowth
