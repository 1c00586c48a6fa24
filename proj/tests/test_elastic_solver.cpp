#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/elastic_solver.hpp"
#include "fracgrowth/errors.hpp"
#include "fracgrowth/evolution.hpp"

using namespace fracgrowth;

namespace {

const Polynomial2 kX{0.0, 1.0};
const Polynomial2 kY{0.0, 0.0, 1.0};

Domain split_domain(double h) {
  return Domain(0, 1, 0, 1, h, {{Side::left, 0, 1}, {Side::right, 0, 1}}, {{Side::bottom, 0, 1}, {Side::top, 0, 1}});
}

double relative_gradient_gap(const Field& a, const Field& b) {
  const auto ga = quadrature_gradients(a), gb = quadrature_gradients(b);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < ga.size(); ++k) {
    diff = std::max(diff, (ga[k] - gb[k]).cwiseAbs().maxCoeff());
    scale = std::max(scale, ga[k].cwiseAbs().maxCoeff());
  }
  return diff / std::max(scale, 1e-300);
}

Field random_start(const Domain& d, const DiscreteCrackMask& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto f = Field::zeros(d, m, 1);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

DiscreteCrackMask koch_mask(const Domain& d, double a, Point origin = {0.0, 0.5}) {
  return rasterize_crack(koch_family(origin).with_tip(a), d, 4);
}

}  // namespace

TEST(SolveScalar, ReproducesLinearDatum) {
  const auto d = Domain::unit_square(1.0 / 64);
  const auto m = DiscreteCrackMask::empty(d);
  const auto sol = solve_scalar(d, m, Integrand::quadratic(), interpolate(d, m, kX));
  for (std::size_t n = 0; n < d.node_count(); ++n)
    EXPECT_NEAR(sol.field(n), d.position(d.node_i(n), d.node_j(n)).x(), 1e-10);
  EXPECT_NEAR(sol.energy, 0.5, 1e-9);
}

TEST(SolveScalar, SplitSquareIsPiecewiseConstant) {
  const double h = 1.0 / 16;
  const auto d = split_domain(h);
  const std::vector<Point> cut{Point(0.5 + h / 2, 0.0), Point(0.5 + h / 2, 1.0)};
  const auto m = rasterize_polyline(cut, d);
  const auto sol = solve_scalar(d, m, Integrand::quadratic(), interpolate(d, m, kX));
  for (std::size_t n = 0; n < d.node_count(); ++n)
    EXPECT_NEAR(sol.field(n), d.node_i(n) <= 8 ? 0.0 : 1.0, 1e-10);
  EXPECT_NEAR(sol.energy, 0.0, 1e-12);
}

TEST(SolveScalar, HarmonicDatumConvergesAtSecondOrder) {
  const Polynomial2 w{0, 0, 0, 1.0, 0.0, -1.0};
  const auto energy_at = [&](double h) {
    const auto d = Domain::unit_square(h);
    const auto m = DiscreteCrackMask::empty(d);
    return solve_scalar(d, m, Integrand::quadratic(), interpolate(d, m, w)).energy;
  };
  const double h = 1.0 / 16;
  const double coarse = energy_at(h), reference = energy_at(h / 4);
  EXPECT_LE(std::abs(coarse - reference), 2.0 * h * h);
  EXPECT_LE(std::abs(reference - 4.0 / 3.0), 2.0 * (h / 4) * (h / 4));
}

TEST(SolveScalar, PPowerConvergesAndIsBelowDatum) {
  const auto d = Domain::unit_square(1.0 / 16);
  const auto m = koch_mask(d, 0.6);
  const auto f = Integrand::p_power(1.5);
  const auto datum = interpolate(d, m, Polynomial2{0.0, 1.0, 0.5, 0.0, 0.3});
  const auto sol = solve_scalar(d, m, f, datum);
  EXPECT_GT(sol.report.newton_steps, 0);
  EXPECT_LE(sol.report.residual, 1e-8);
  EXPECT_LE(sol.energy, elastic_energy(datum, f) + 1e-12);
}

TEST(SolvePlanar, AffineAndRigidData) {
  const auto d = Domain::unit_square(1.0 / 64);
  const auto m = DiscreteCrackMask::empty(d);
  const ElasticityTensor tensor(0.0, 1.0);
  const auto stretch = solve_planar(d, m, tensor, interpolate(d, m, kX, kY));
  EXPECT_NEAR(stretch.energy, 2.0, 1e-8);
  const double theta = 0.01;
  const auto rigid = solve_planar(d, m, tensor, interpolate(d, m, Polynomial2{0.3, 0.0, -theta}, Polynomial2{-0.2, theta}));
  EXPECT_LE(rigid.energy, 1e-9);
}

TEST(SolvePlanar, CrackLowersStretchEnergy) {
  const auto d = Domain::unit_square(1.0 / 32);
  const ElasticityTensor tensor(0.5, 1.0);
  std::vector<double> energies;
  for (double a : {0.0, 0.5, 1.0}) {
    const auto m = koch_mask(d, a);
    energies.push_back(solve_planar(d, m, tensor, interpolate(d, m, Polynomial2{}, kY)).energy);
  }
  EXPECT_GT(energies[0], energies[1]);
  EXPECT_GT(energies[1], energies[2]);
  EXPECT_GT(energies[0] - energies[2], energies[0] - energies[1]);
}

TEST(Energy, TotalEnergyExamples) {
  const auto d = Domain::unit_square(1.0 / 16);
  const auto m = DiscreteCrackMask::empty(d);
  const auto f = Integrand::quadratic();
  const auto zero = Field::zeros(d, m, 1);
  EXPECT_EQ(total_energy(zero, f, koch_family({0.0, 0.5})), 0.0);
  EXPECT_DOUBLE_EQ(total_energy(zero, f, koch_family({0.0, 0.5}).with_tip(0.4)), 0.4);
  EXPECT_NEAR(total_energy(interpolate(d, m, kX), f, koch_family({0.0, 0.5}).with_tip(0.25)), 0.75, 1e-12);
}

TEST(Energy, WorkRateExamples) {
  const auto d = Domain::unit_square(1.0 / 16);
  const auto m = DiscreteCrackMask::empty(d);
  const auto f = Integrand::quadratic();
  const auto u = interpolate(d, m, kX);
  EXPECT_EQ(work_rate(u, Field::zeros(d, m, 1), f), 0.0);
  EXPECT_NEAR(work_rate(u, u, f), 1.0, 1e-12);

  const auto cracked = koch_mask(d, 0.7);
  const Polynomial2 w0{0.0, 1.0, 1.0};
  const auto u1 = solve_scalar(d, cracked, f, interpolate(d, cracked, w0.scaled(0.8))).field;
  const auto u2 = solve_scalar(d, cracked, f, interpolate(d, cracked, w0.scaled(1.6))).field;
  const auto wdot = interpolate(d, cracked, w0);
  EXPECT_NEAR(work_rate(u2, wdot, f) / work_rate(u1, wdot, f), 2.0, 1e-8);
}

TEST(Uniqueness, GradientsAgreeFromDifferentStarts) {
  const auto d = Domain::unit_square(1.0 / 32);
  const auto m = koch_mask(d, 0.8);
  const auto datum = interpolate(d, m, Polynomial2{0.1, 1.0, -0.5, 0.5});
  const auto start = random_start(d, m, 5);
  SolverSettings tight;
  tight.linear_tolerance = 1e-12;
  const auto q1 = solve_scalar(d, m, Integrand::quadratic(), datum, tight);
  const auto q2 = solve_scalar(d, m, Integrand::quadratic(), datum, tight, &start);
  EXPECT_LE(relative_gradient_gap(q1.field, q2.field), 1e-7);

  const auto f = Integrand::p_power(1.5);
  const auto p1 = solve_scalar(d, m, f, datum);
  const auto p2 = solve_scalar(d, m, f, datum, {}, &start);
  EXPECT_LE(relative_gradient_gap(p1.field, p2.field), 1e-5);
}

TEST(Properties, EnergyBelowInterpolatedDatum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const auto d = Domain::unit_square(1.0 / 16);
  for (int k = 0; k < 6; ++k) {
    const Polynomial2 w{c(rng), c(rng), c(rng), c(rng), c(rng), c(rng)};
    const auto m = koch_mask(d, 0.15 * k);
    const auto datum = interpolate(d, m, w);
    for (const auto& f : {Integrand::quadratic(), Integrand::p_power(1.7)})
      EXPECT_LE(solve_scalar(d, m, f, datum).energy, elastic_energy(datum, f) + 1e-12);
  }
}

TEST(Properties, EnlargingTheMaskNeverRaisesEnergy) {
  const auto d = Domain::unit_square(1.0 / 32);
  const Polynomial2 w{0.0, 0.3, 1.0};
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 16; ++k) {
    const auto m = koch_mask(d, k / 16.0);
    const double e = solve_scalar(d, m, Integrand::quadratic(), interpolate(d, m, w)).energy;
    EXPECT_LE(e, prev + 1e-10) << k;
    prev = e;
  }
}

TEST(Constraints, ReleaseAndPinning) {
  const auto d = Domain::unit_square(0.25);
  DiscreteCrackMask m = DiscreteCrackMask::empty(d);
  m.sever_horizontal(0, 0);
  m.sever_vertical(0, 0);
  // Box off the centre node (2, 2).
  m.sever_horizontal(1, 2);
  m.sever_horizontal(2, 2);
  m.sever_vertical(2, 1);
  m.sever_vertical(2, 2);
  const auto c = classify_nodes(d, m);
  using Role = NodeConstraints::Role;
  EXPECT_EQ(c.released_dirichlet, 1u);
  EXPECT_EQ(c.role[d.node(0, 0)], Role::pinned);
  EXPECT_EQ(c.role[d.node(2, 2)], Role::pinned);
  EXPECT_EQ(c.role[d.node(1, 1)], Role::free);
  EXPECT_EQ(c.role[d.node(4, 1)], Role::dirichlet);

  const auto sol = solve_scalar(d, m, Integrand::quadratic(), interpolate(d, m, Polynomial2{1.0, 1.0}));
  EXPECT_EQ(sol.field(d.node(0, 0)), 0.0);
  EXPECT_EQ(sol.field(d.node(2, 2)), 0.0);
  EXPECT_EQ(sol.report.released_dirichlet, 1u);
  EXPECT_EQ(sol.report.pinned_nodes, 2u);
}

TEST(Solver, IterationCapRaisesSolverError) {
  const auto d = Domain::unit_square(1.0 / 32);
  const auto m = DiscreteCrackMask::empty(d);
  SolverSettings s;
  s.iteration_cap = 1;
  try {
    solve_scalar(d, m, Integrand::quadratic(), interpolate(d, m, Polynomial2{0, 0, 0, 1.0}), s);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.residual(), 1e-10);
  }
}

TEST(Solver, Deterministic) {
  const auto d = Domain::unit_square(1.0 / 32);
  const auto m = koch_mask(d, 0.9);
  const auto datum = interpolate(d, m, Polynomial2{0.0, 1.0, 2.0});
  const auto a = solve_scalar(d, m, Integrand::p_power(1.5), datum);
  const auto b = solve_scalar(d, m, Integrand::p_power(1.5), datum);
  EXPECT_TRUE(std::equal(a.field.values().begin(), a.field.values().end(), b.field.values().begin()));
  EXPECT_EQ(a.energy, b.energy);
}
