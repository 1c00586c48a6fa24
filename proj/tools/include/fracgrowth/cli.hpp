#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracgrowth::cli {

enum ExitCode : int { ok = 0, validation_error = 1, solver_error = 2, audit_failure = 3 };

/// Runs one subcommand (curve, solve, evolve, audit, converge, dimension).
/// `args` excludes the program name. Diagnostics go to `err`, progress
/// summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracgrowth::cli
