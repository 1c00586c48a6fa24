#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "fracgrowth/crack_family.hpp"
#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/domain.hpp"
#include "fracgrowth/field.hpp"
#include "fracgrowth/material.hpp"

namespace fracgrowth {

// Discrete energy. Every cell is integrated with four combinations of one
// horizontal edge (bottom/top) and one vertical edge (left/right), each of
// weight h^2 / 4; the edge differences give the x and y derivatives. A
// combination touching a severed edge is dropped, so severing edges only
// removes non-negative terms and nodes only interact through unsevered
// edges.

struct SolverSettings {
  double linear_tolerance = 1e-10;    ///< relative residual of each CG solve
  /// p_power stops once sqrt(-g . d) <= this, g the energy gradient and d
  /// the model step (the gradient's norm in the dual of the model metric).
  double gradient_tolerance = 1e-8;
  long iteration_cap = 0;             ///< CG iterations per solve; 0 = 10 x node count
  int newton_cap = 200;
  double hessian_floor = 1e-12;  ///< lower bound on |xi| in the p_power model matrix
  bool operator==(const SolverSettings&) const = default;
};

struct SolveReport {
  long iterations = 0;       ///< CG iterations summed over Newton steps
  int newton_steps = 0;
  double residual = 0.0;     ///< relative CG residual (linear) or final decrement (p_power)
  std::size_t free_dofs = 0;
  std::size_t pinned_nodes = 0;
  std::size_t released_dirichlet = 0;
};

struct Solution {
  Field field;
  double energy = 0.0;
  SolveReport report;
};

/// Role of every node under a mask. Two nodes are coupled when the edge
/// between them enters some active combination. Dirichlet nodes keep the
/// datum unless nothing couples them (then they are released), nodes in
/// coupled components without a Dirichlet node are pinned to 0, all others
/// are free.
struct NodeConstraints {
  enum class Role : unsigned char { free, dirichlet, pinned };
  std::vector<Role> role;
  std::size_t released_dirichlet = 0;
};

NodeConstraints classify_nodes(const Domain& domain, const DiscreteCrackMask& mask);

/// Minimizes sum_cells f(grad_h u) h^2 over fields equal to `datum` on the
/// active Dirichlet nodes. `initial` (optional) seeds the free nodes.
Solution solve_scalar(const Domain& domain, const DiscreteCrackMask& mask, const Integrand& f, const Field& datum,
                      const SolverSettings& settings = {}, const Field* initial = nullptr);

/// Minimizes (1/2) sum_cells C E_h u : E_h u h^2 for a 2-component datum.
Solution solve_planar(const Domain& domain, const DiscreteCrackMask& mask, const ElasticityTensor& tensor,
                      const Field& datum, const SolverSettings& settings = {}, const Field* initial = nullptr);

double elastic_energy(const Field& u, const Integrand& f);
double elastic_energy(const Field& u, const ElasticityTensor& tensor);

/// Bulk energy plus the alpha-measure of the crack.
double total_energy(const Field& u, const Integrand& f, const Crack& crack);
double total_energy(const Field& u, const ElasticityTensor& tensor, const Crack& crack);

/// sum_cells D f(grad_h u) . grad_h wdot h^2, both gradients taken with
/// u's mask.
double work_rate(const Field& u, const Field& wdot, const Integrand& f);
double work_rate(const Field& u, const Field& wdot, const ElasticityTensor& tensor);

/// Per-cell, per-combination gradients (4 per cell, cell-major, zero for
/// dropped combinations) with the field's own mask; components (d/dx, d/dy)
/// for scalar fields and (dx ux, dx uy, dy ux, dy uy) for planar ones.
std::vector<Eigen::Vector4d> quadrature_gradients(const Field& u);

/// sum_cells (1/4) sum_combos |grad_h a - grad_h b|^p h^2, each field with
/// its own mask (dropped combinations count as gradient 0).
double gradient_distance(const Field& a, const Field& b, double p);

}  // namespace fracgrowth
