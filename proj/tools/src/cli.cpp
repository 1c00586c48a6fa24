#include "fracgrowth/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/errors.hpp"
#include "fracgrowth/evolution.hpp"
#include "fracgrowth/geometry.hpp"
#include "fracgrowth/run_config.hpp"
#include "fracgrowth/serialization.hpp"
#include "fracgrowth/verification.hpp"

namespace fracgrowth::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string trace;
};

class Run {
 public:
  Run(std::string command, RunConfig config, std::ostream& out)
      : command_(std::move(command)), config_(std::move(config)), out_(out), start_(Clock::now()) {
    fs::create_directories(config_.output.dir);
  }

  const RunConfig& config() const { return config_; }

  template <class Writer>
  void write(const std::string& name, Writer&& writer) {
    const auto path = fs::path(config_.output.dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError(fmt::format("cannot write {}", path.string()));
    writer(f);
    if (!f) throw ValidationError(fmt::format("failed writing {}", path.string()));
    outputs_.push_back(name);
  }

  void lap(const std::string& name) {
    const auto now = Clock::now();
    timings_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

  void finish() {
    timings_["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
    outputs_.push_back("manifest.json");
    const auto path = fs::path(config_.output.dir) / "manifest.json";
    std::ofstream f(path, std::ios::binary);
    f << manifest_json(config_, command_, timings_, outputs_);
    fmt::print(out_, "{}: wrote {} files to {} (config {})\n", command_, outputs_.size(), config_.output.dir,
               hex64(config_hash(config_)));
  }

 private:
  std::string command_;
  RunConfig config_;
  std::ostream& out_;
  Clock::time_point start_;
  Clock::time_point last_ = start_;
  std::map<std::string, double> timings_;
  std::vector<std::string> outputs_;
};

RunConfig resolve(const Options& o) {
  auto c = load_run_config(o.config);
  if (!o.out_dir.empty()) c.output.dir = o.out_dir;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) {
    if (*o.threads < 1) throw ValidationError("--threads must be at least 1");
    c.threads = *o.threads;
  }
  return c;
}

int cmd_curve(Run& run) {
  const auto& c = run.config();
  const auto curve = build_curve(c);
  const int depth = c.curve_output.depth;
  const auto points = prefractal(*curve, depth);
  std::vector<double> s(points.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = curve->junction_parameter(k, depth);
  run.write("prefractal.csv", [&](std::ostream& f) { write_polyline_csv(f, s, points); });
  run.lap("prefractal");
  const auto est = estimate_holder_constants(*curve, c.curve_output.holder_depth, 4096, c.seed);
  run.write("holder.csv", [&](std::ostream& f) {
    f << "depth,c_est,C_est,pairs\n"
      << fmt::format("{},{},{},{}\n", c.curve_output.holder_depth, est.c_est, est.C_est, est.pairs);
  });
  run.lap("holder");
  return ok;
}

int cmd_solve(Run& run) {
  const auto& c = run.config();
  const auto crack = build_crack(c, build_curve(c));
  const auto domain = build_domain(c);
  const auto physics = build_physics(c);
  const auto mask = rasterize_crack(crack, domain, c.evolution.raster_depth, {c.evolution.enforce_coupling});
  run.lap("rasterize");
  const auto sol = solve_static(physics, domain, mask, datum_field(physics, domain, mask, 1.0), c.solver);
  run.lap("solve");
  if (c.output.fields) run.write("field.csv", [&](std::ostream& f) { write_field_csv(f, sol.field); });
  if (c.output.masks) run.write("mask.csv", [&](std::ostream& f) { write_mask_csv(f, mask); });
  run.write("energy.csv", [&](std::ostream& f) {
    f << "E_elastic,E_surface,E_total,iterations,newton_steps,residual\n"
      << fmt::format("{},{},{},{},{},{}\n", sol.energy, alpha_measure(crack), sol.energy + alpha_measure(crack),
                     sol.report.iterations, sol.report.newton_steps, sol.report.residual);
  });
  return ok;
}

int cmd_evolve(Run& run) {
  const auto ec = build_evolution(run.config());
  const auto trace = run_evolution(ec);
  run.lap("evolution");
  run.write("trace.csv", [&](std::ostream& f) { write_trace_csv(f, trace); });
  return ok;
}

int cmd_audit(Run& run, const std::string& trace_path, std::ostream& err) {
  if (trace_path.empty()) throw ValidationError("audit needs --trace <file>");
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open trace {}", trace_path));
  const auto trace = read_trace_csv(in);
  const auto ec = build_evolution(run.config());
  int status = ok;
  if (const auto bad = audit_bookkeeping(trace)) {
    fmt::print(err, "audit: record {} breaks irreversibility or energy bookkeeping\n", *bad);
    status = audit_failure;
  }
  const CandidateSet candidates(ec);
  const auto balance = audit_energy_balance(trace);
  std::vector<double> violation(trace.records.size());
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    violation[k] = audit_stability(trace, ec, k, candidates);
    if (!(violation[k] <= ec.stability_tolerance)) {
      fmt::print(err, "audit: record {} violates stability by {}\n", k, violation[k]);
      status = audit_failure;
    }
  }
  run.lap("audit");
  run.write("audit.csv", [&](std::ostream& f) {
    f << "i,t,a,stability_violation,energy_defect\n";
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
      const auto& r = trace.records[k];
      f << fmt::format("{},{},{},{},{}\n", r.i, r.t, r.a, violation[k], balance.defect[k]);
    }
  });
  run.write("energy_balance.csv", [&](std::ostream& f) {
    f << "residual,constant\n" << fmt::format("{},{}\n", balance.residual, balance.constant);
  });
  return status;
}

int cmd_converge(Run& run) {
  const auto& c = run.config();
  const auto crack = build_crack(c, build_curve(c));
  const auto report = minimizer_convergence_study(crack, build_physics(c), build_domain(c), c.converge.depths,
                                                  c.solver);
  run.lap("study");
  run.write("convergence.csv", [&](std::ostream& f) { write_convergence_csv(f, report); });
  return ok;
}

int cmd_dimension(Run& run) {
  const auto& c = run.config();
  const auto curve = build_curve(c);
  const auto points = prefractal(*curve, c.dimension.depth);
  const auto est = box_dimension_estimate(points, c.dimension.eps);
  std::vector<double> content;
  for (std::size_t k = 0; k < est.counts.size(); ++k)
    content.push_back(static_cast<double>(est.counts[k]) * std::pow(c.dimension.eps[k], curve->alpha()));
  run.write("box_counts.csv", [&](std::ostream& f) { write_content_csv(f, c.dimension.eps, est.counts, content); });
  run.write("dimension.csv", [&](std::ostream& f) { write_dimension_csv(f, est); });
  run.lap("box_counting");
  const auto demo = semicontinuity_demo(*curve, c.dimension.content_depths, c.dimension.content_eps, curve->alpha(),
                                        c.dimension.deep_depth);
  run.write("semicontinuity.csv", [&](std::ostream& f) { write_semicontinuity_csv(f, demo); });
  run.lap("semicontinuity");
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasistatic growth of self-similar cracks"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> names{"curve", "solve", "evolve", "audit", "converge", "dimension"};
  const std::map<std::string, std::string> help{
      {"curve", "prefractal polyline and Hölder constants"},
      {"solve", "one static solve with the configured crack"},
      {"evolve", "incremental minimization over the load program"},
      {"audit", "stability and energy-balance audit of a trace"},
      {"converge", "minimizer convergence over crack depths"},
      {"dimension", "box counting and content tables"},
  };
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", o.config, "JSON run configuration")->required();
    sub->add_option("--out", o.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "random seed (overrides seed)");
    sub->add_option("--threads", o.threads, "thread cap (overrides threads)");
    if (name == "audit") sub->add_option("--trace", o.trace, "trace CSV to audit")->required();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? ok : validation_error;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    Run r(command, resolve(o), out);
    int status = ok;
    if (command == "curve") status = cmd_curve(r);
    else if (command == "solve") status = cmd_solve(r);
    else if (command == "evolve") status = cmd_evolve(r);
    else if (command == "audit") status = cmd_audit(r, o.trace, err);
    else if (command == "converge") status = cmd_converge(r);
    else status = cmd_dimension(r);
    r.finish();
    return status;
  } catch (const SolverError& e) {
    fmt::print(err, "solver error: {}\n", e.what());
    return solver_error;
  } catch (const StepError& e) {
    fmt::print(err, "solver error: {}\n", e.what());
    return solver_error;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return validation_error;
  }
}

}  // namespace fracgrowth::cli
