#include "fracgrowth/elastic_solver.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

struct EdgeRef {
  std::size_t from = 0, to = 0;
  bool ok = false;
};

struct Combo {
  EdgeRef x, y;
  bool active = false;
};

// Combinations (bottom|top) x (left|right); one is active only when both of
// its edges are unsevered.
std::array<Combo, 4> cell_combos(const Domain& d, const DiscreteCrackMask& m, int i, int j) {
  const auto n00 = d.node(i, j), n10 = d.node(i + 1, j);
  const auto n01 = d.node(i, j + 1), n11 = d.node(i + 1, j + 1);
  const EdgeRef bottom{n00, n10, !m.horizontal(i, j)};
  const EdgeRef top{n01, n11, !m.horizontal(i, j + 1)};
  const EdgeRef left{n00, n01, !m.vertical(i, j)};
  const EdgeRef right{n10, n11, !m.vertical(i + 1, j)};
  const auto combo = [](const EdgeRef& x, const EdgeRef& y) { return Combo{x, y, x.ok && y.ok}; };
  return {combo(bottom, left), combo(bottom, right), combo(top, left), combo(top, right)};
}

template <int C>
using LocalVec = Eigen::Matrix<double, 2 * C, 1>;
template <int C>
using LocalMat = Eigen::Matrix<double, 2 * C, 2 * C>;

// Local component k < C is d/dx of displacement component k (x edge);
// k >= C is d/dy of component k - C (y edge).
template <int C>
const EdgeRef& edge_of(const Combo& q, int k) {
  return k < C ? q.x : q.y;
}

template <int C>
LocalVec<C> local_gradient(const Combo& q, std::span<const double> u, double inv_h) {
  LocalVec<C> g = LocalVec<C>::Zero();
  for (int k = 0; k < 2 * C; ++k) {
    const EdgeRef& e = edge_of<C>(q, k);
    if (!e.ok) continue;
    const auto c = static_cast<std::size_t>(k % C);
    g[k] = (u[e.to * C + c] - u[e.from * C + c]) * inv_h;
  }
  return g;
}

// The model matrix for p_power is the lagged diffusivity |xi|^(p-2) I: it
// dominates the true Hessian for p <= 2, so the model majorizes the energy
// and a unit step never overshoots a direction in which |xi| tends to 0.
struct ScalarDensity {
  const Integrand& f;
  double floor;
  double value(const LocalVec<1>& g) const { return f.value(g); }
  LocalVec<1> gradient(const LocalVec<1>& g) const { return f.gradient(g); }
  LocalMat<1> hessian(const LocalVec<1>& g) const {
    if (f.kind() == Integrand::Kind::quadratic) return LocalMat<1>::Identity();
    return std::pow(std::max(g.norm(), floor), f.p() - 2.0) * LocalMat<1>::Identity();
  }
};

// g = (dx ux, dx uy, dy ux, dy uy); strain = sym(grad u).
struct PlanarDensity {
  const ElasticityTensor& t;
  double value(const LocalVec<2>& g) const {
    const double a = g[0], b = g[1], c = g[2], d = g[3];
    return t.mu() * (a * a + d * d + 0.5 * (b + c) * (b + c)) + 0.5 * t.lambda() * (a + d) * (a + d);
  }
  LocalVec<2> gradient(const LocalVec<2>& g) const {
    const double tr = g[0] + g[3], shear = t.mu() * (g[1] + g[2]);
    return {2.0 * t.mu() * g[0] + t.lambda() * tr, shear, shear, 2.0 * t.mu() * g[3] + t.lambda() * tr};
  }
  LocalMat<2> hessian(const LocalVec<2>&) const {
    const double m = t.mu(), l = t.lambda();
    LocalMat<2> H;
    H << 2 * m + l, 0, 0, l,
         0, m, m, 0,
         0, m, m, 0,
         l, 0, 0, 2 * m + l;
    return H;
  }
};

template <int C, class Density, class Visit>
void for_each_combo(const Domain& d, const DiscreteCrackMask& m, const Density&, Visit&& visit) {
  for (int j = 0; j < d.ny(); ++j)
    for (int i = 0; i < d.nx(); ++i)
      for (const auto& q : cell_combos(d, m, i, j))
        if (q.active) visit(q);
}

template <int C, class Density>
double energy_of(const Domain& d, const DiscreteCrackMask& m, const Density& rho, std::span<const double> u) {
  const double w = 0.25 * d.h() * d.h(), inv_h = 1.0 / d.h();
  double e = 0.0;
  for_each_combo<C>(d, m, rho, [&](const Combo& q) { e += w * rho.value(local_gradient<C>(q, u, inv_h)); });
  return e;
}

template <int C, class Density>
void energy_gradient(const Domain& d, const DiscreteCrackMask& m, const Density& rho, std::span<const double> u,
                     std::vector<double>& grad) {
  const double w = 0.25 * d.h() * d.h(), inv_h = 1.0 / d.h();
  grad.assign(u.size(), 0.0);
  for_each_combo<C>(d, m, rho, [&](const Combo& q) {
    const LocalVec<C> s = w * inv_h * rho.gradient(local_gradient<C>(q, u, inv_h));
    for (int k = 0; k < 2 * C; ++k) {
      const EdgeRef& e = edge_of<C>(q, k);
      if (!e.ok) continue;
      const auto c = static_cast<std::size_t>(k % C);
      grad[e.to * C + c] += s[k];
      grad[e.from * C + c] -= s[k];
    }
  });
}

template <int C, class Density>
Eigen::SparseMatrix<double> energy_hessian(const Domain& d, const DiscreteCrackMask& m, const Density& rho,
                                           std::span<const double> u, const std::vector<long>& free_index,
                                           std::size_t n_free) {
  const double w = 0.25 * d.h() * d.h(), inv_h = 1.0 / d.h();
  const double scale = w * inv_h * inv_h;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(d.nx()) * static_cast<std::size_t>(d.ny()) * 4 * 16 * C * C);
  for_each_combo<C>(d, m, rho, [&](const Combo& q) {
    const LocalMat<C> H = scale * rho.hessian(local_gradient<C>(q, u, inv_h));
    std::array<std::array<long, 2>, 2 * C> dofs;
    for (int k = 0; k < 2 * C; ++k) {
      const EdgeRef& e = edge_of<C>(q, k);
      const auto c = static_cast<std::size_t>(k % C);
      dofs[k] = e.ok ? std::array<long, 2>{free_index[e.to * C + c], free_index[e.from * C + c]}
                     : std::array<long, 2>{-1, -1};
    }
    for (int k = 0; k < 2 * C; ++k)
      for (int l = 0; l < 2 * C; ++l) {
        if (H(k, l) == 0.0) continue;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const long r = dofs[k][a], col = dofs[l][b];
            if (r < 0 || col < 0) continue;
            trip.emplace_back(r, col, (a == b ? 1.0 : -1.0) * H(k, l));
          }
      }
  });
  Eigen::SparseMatrix<double> A(static_cast<long>(n_free), static_cast<long>(n_free));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

template <int C, class Density>
Solution minimize(const Domain& domain, const DiscreteCrackMask& mask, const Density& rho, bool linear,
                  const Field& datum, const SolverSettings& settings, const Field* initial) {
  if (datum.components() != C) throw ValidationError("datum has the wrong number of components");
  if (datum.domain().nx() != domain.nx() || datum.domain().ny() != domain.ny())
    throw ValidationError("datum lives on a different grid");
  if (mask.nx() != domain.nx() || mask.ny() != domain.ny()) throw ValidationError("mask does not match the domain");
  if (initial && (initial->components() != C || initial->values().size() != datum.values().size()))
    throw ValidationError("initial guess does not match the datum");

  const auto roles = classify_nodes(domain, mask);
  const std::size_t n_dofs = domain.node_count() * C;
  std::vector<long> free_index(n_dofs, -1);
  std::vector<double> u(n_dofs, 0.0);
  std::size_t n_free = 0, pinned = 0;
  for (std::size_t n = 0; n < domain.node_count(); ++n) {
    const auto role = roles.role[n];
    if (role == NodeConstraints::Role::pinned) ++pinned;
    for (std::size_t c = 0; c < C; ++c) {
      const auto dof = n * C + c;
      switch (role) {
        case NodeConstraints::Role::dirichlet: u[dof] = datum.values()[dof]; break;
        case NodeConstraints::Role::pinned: u[dof] = 0.0; break;
        case NodeConstraints::Role::free:
          u[dof] = initial ? initial->values()[dof] : datum.values()[dof];
          free_index[dof] = static_cast<long>(n_free++);
          break;
      }
    }
  }

  SolveReport report;
  report.free_dofs = n_free;
  report.pinned_nodes = pinned;
  report.released_dirichlet = roles.released_dirichlet;
  const long cap = settings.iteration_cap > 0 ? settings.iteration_cap : 10 * static_cast<long>(domain.node_count());

  std::vector<double> grad;
  Eigen::VectorXd g_free(static_cast<long>(n_free));
  const auto gather = [&] {
    energy_gradient<C>(domain, mask, rho, u, grad);
    for (std::size_t dof = 0; dof < n_dofs; ++dof)
      if (free_index[dof] >= 0) g_free[free_index[dof]] = grad[dof];
  };

  double energy = energy_of<C>(domain, mask, rho, u);
  for (int step = 0; n_free > 0; ++step) {
    gather();
    const auto H = energy_hessian<C>(domain, mask, rho, u, free_index, n_free);
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(settings.linear_tolerance);
    cg.setMaxIterations(cap);
    cg.compute(H);
    const Eigen::VectorXd dir = cg.solve(-g_free);
    report.iterations += cg.iterations();
    if (cg.info() != Eigen::Success)
      throw SolverError(fmt::format("conjugate gradient stopped at relative residual {} after {} iterations",
                                    cg.error(), cg.iterations()),
                        cg.error(), report.iterations);

    const auto step_to = [&](double t) {
      std::vector<double> v = u;
      for (std::size_t dof = 0; dof < n_dofs; ++dof)
        if (free_index[dof] >= 0) v[dof] += t * dir[free_index[dof]];
      return v;
    };

    if (linear) {
      u = step_to(1.0);
      energy = energy_of<C>(domain, mask, rho, u);
      report.residual = cg.error();
      report.newton_steps = 1;
      break;
    }

    const double slope = g_free.dot(dir);
    report.residual = std::sqrt(std::max(0.0, -slope));
    if (report.residual <= settings.gradient_tolerance) break;
    if (step >= settings.newton_cap)
      throw SolverError(fmt::format("Newton iteration did not converge: decrement {}", report.residual),
                        report.residual, report.iterations);
    ++report.newton_steps;

    const double noise = 1e-13 * std::max(1.0, std::abs(energy));
    double t = 1.0;
    for (;;) {
      auto trial = step_to(t);
      const double e = energy_of<C>(domain, mask, rho, trial);
      if (e <= energy + 1e-4 * t * slope + noise) {
        u = std::move(trial);
        energy = e;
        break;
      }
      t *= 0.5;
      if (t < 1e-12)
        throw SolverError(fmt::format("line search failed at decrement {}", report.residual), report.residual,
                          report.iterations);
    }
  }

  return {Field(domain, mask, C, std::move(u)), energy, report};
}

template <int C, class Density>
double work_of(const Field& u, const Field& wdot, const Density& rho) {
  if (u.components() != C || wdot.components() != C || u.values().size() != wdot.values().size())
    throw ValidationError("work_rate fields do not match");
  const auto& d = u.domain();
  const double w = 0.25 * d.h() * d.h(), inv_h = 1.0 / d.h();
  double sum = 0.0;
  for_each_combo<C>(d, u.mask(), rho, [&](const Combo& q) {
    sum += w * rho.gradient(local_gradient<C>(q, u.values(), inv_h)).dot(local_gradient<C>(q, wdot.values(), inv_h));
  });
  return sum;
}

template <int C>
Eigen::Vector4d widen(const LocalVec<C>& g) {
  Eigen::Vector4d out = Eigen::Vector4d::Zero();
  out.head<2 * C>() = g;
  return out;
}

}  // namespace

NodeConstraints classify_nodes(const Domain& domain, const DiscreteCrackMask& mask) {
  const int nx = domain.nx(), ny = domain.ny();
  // An edge couples its nodes only through active combinations, i.e. when it
  // is unsevered and some adjacent cell keeps a perpendicular edge.
  const auto cell_has_vertical = [&](int i, int j) {
    return j >= 0 && j < ny && (!mask.vertical(i, j) || !mask.vertical(i + 1, j));
  };
  const auto cell_has_horizontal = [&](int i, int j) {
    return i >= 0 && i < nx && (!mask.horizontal(i, j) || !mask.horizontal(i, j + 1));
  };
  const auto h_live = [&](int i, int j) {
    return !mask.horizontal(i, j) && (cell_has_vertical(i, j) || cell_has_vertical(i, j - 1));
  };
  const auto v_live = [&](int i, int j) {
    return !mask.vertical(i, j) && (cell_has_horizontal(i, j) || cell_has_horizontal(i - 1, j));
  };

  const std::size_t n = domain.node_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  const auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  std::vector<unsigned char> coupled(n, 0);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (i < nx && h_live(i, j)) {
        unite(domain.node(i, j), domain.node(i + 1, j));
        coupled[domain.node(i, j)] = coupled[domain.node(i + 1, j)] = 1;
      }
      if (j < ny && v_live(i, j)) {
        unite(domain.node(i, j), domain.node(i, j + 1));
        coupled[domain.node(i, j)] = coupled[domain.node(i, j + 1)] = 1;
      }
    }

  NodeConstraints out;
  out.role.assign(n, NodeConstraints::Role::pinned);
  std::vector<unsigned char> anchored(n, 0);
  std::vector<unsigned char> active(n, 0);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (!domain.on_dirichlet(i, j)) continue;
      if (!coupled[domain.node(i, j)]) {
        ++out.released_dirichlet;
        continue;
      }
      active[domain.node(i, j)] = 1;
      anchored[find(domain.node(i, j))] = 1;
    }
  for (std::size_t k = 0; k < n; ++k) {
    if (active[k])
      out.role[k] = NodeConstraints::Role::dirichlet;
    else if (anchored[find(k)])
      out.role[k] = NodeConstraints::Role::free;
  }
  return out;
}

Solution solve_scalar(const Domain& domain, const DiscreteCrackMask& mask, const Integrand& f, const Field& datum,
                      const SolverSettings& settings, const Field* initial) {
  return minimize<1>(domain, mask, ScalarDensity{f, settings.hessian_floor},
                     f.kind() == Integrand::Kind::quadratic, datum, settings, initial);
}

Solution solve_planar(const Domain& domain, const DiscreteCrackMask& mask, const ElasticityTensor& tensor,
                      const Field& datum, const SolverSettings& settings, const Field* initial) {
  return minimize<2>(domain, mask, PlanarDensity{tensor}, true, datum, settings, initial);
}

double elastic_energy(const Field& u, const Integrand& f) {
  if (u.components() != 1) throw ValidationError("scalar energy needs a scalar field");
  return energy_of<1>(u.domain(), u.mask(), ScalarDensity{f, 0.0}, u.values());
}

double elastic_energy(const Field& u, const ElasticityTensor& tensor) {
  if (u.components() != 2) throw ValidationError("planar energy needs a 2-component field");
  return energy_of<2>(u.domain(), u.mask(), PlanarDensity{tensor}, u.values());
}

double total_energy(const Field& u, const Integrand& f, const Crack& crack) {
  return elastic_energy(u, f) + alpha_measure(crack);
}

double total_energy(const Field& u, const ElasticityTensor& tensor, const Crack& crack) {
  return elastic_energy(u, tensor) + alpha_measure(crack);
}

double work_rate(const Field& u, const Field& wdot, const Integrand& f) {
  return work_of<1>(u, wdot, ScalarDensity{f, 0.0});
}

double work_rate(const Field& u, const Field& wdot, const ElasticityTensor& tensor) {
  return work_of<2>(u, wdot, PlanarDensity{tensor});
}

std::vector<Eigen::Vector4d> quadrature_gradients(const Field& u) {
  const auto& d = u.domain();
  const double inv_h = 1.0 / d.h();
  std::vector<Eigen::Vector4d> out;
  out.reserve(static_cast<std::size_t>(d.nx()) * static_cast<std::size_t>(d.ny()) * 4);
  for (int j = 0; j < d.ny(); ++j)
    for (int i = 0; i < d.nx(); ++i)
      for (const auto& q : cell_combos(d, u.mask(), i, j)) {
        if (!q.active)
          out.push_back(Eigen::Vector4d::Zero());
        else
          out.push_back(u.components() == 1 ? widen<1>(local_gradient<1>(q, u.values(), inv_h))
                                            : widen<2>(local_gradient<2>(q, u.values(), inv_h)));
      }
  return out;
}

double gradient_distance(const Field& a, const Field& b, double p) {
  if (a.components() != b.components() || a.domain().nx() != b.domain().nx() || a.domain().ny() != b.domain().ny())
    throw ValidationError("gradient_distance needs fields on the same grid");
  const auto ga = quadrature_gradients(a);
  const auto gb = quadrature_gradients(b);
  const double w = 0.25 * a.domain().h() * a.domain().h();
  double sum = 0.0;
  for (std::size_t k = 0; k < ga.size(); ++k) sum += w * std::pow((ga[k] - gb[k]).norm(), p);
  return sum;
}

}  // namespace fracgrowth
