#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/domain.hpp"
#include "fracgrowth/errors.hpp"
#include "fracgrowth/evolution.hpp"
#include "fracgrowth/field.hpp"

using namespace fracgrowth;

namespace {

double point_segment(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double t = d.squaredNorm() == 0 ? 0.0 : std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

bool meet(const Point& p, const Point& q, const Point& a, const Point& b) {
  const double d1 = cross(a, b, p), d2 = cross(a, b, q), d3 = cross(p, q, a), d4 = cross(p, q, b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  const double tol = 1e-12;
  return point_segment(p, a, b) <= tol || point_segment(q, a, b) <= tol || point_segment(a, p, q) <= tol ||
         point_segment(b, p, q) <= tol;
}

DiscreteCrackMask brute_force(std::span<const Point> poly, const Domain& d) {
  DiscreteCrackMask m = DiscreteCrackMask::empty(d);
  for (int j = 0; j <= d.ny(); ++j)
    for (int i = 0; i <= d.nx(); ++i)
      for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        if (i < d.nx() && meet(d.position(i, j), d.position(i + 1, j), poly[k], poly[k + 1])) m.sever_horizontal(i, j);
        if (j < d.ny() && meet(d.position(i, j), d.position(i, j + 1), poly[k], poly[k + 1])) m.sever_vertical(i, j);
      }
  return m;
}

Domain split_domain(double h) {
  return Domain(0, 1, 0, 1, h, {{Side::left, 0, 1}, {Side::right, 0, 1}}, {{Side::bottom, 0, 1}, {Side::top, 0, 1}});
}

}  // namespace

TEST(Domain, GridAndBoundary) {
  const auto d = Domain::unit_square(0.25);
  EXPECT_EQ(d.nx(), 4);
  EXPECT_EQ(d.ny(), 4);
  EXPECT_EQ(d.node_count(), 25u);
  EXPECT_EQ(d.node(2, 3), 17u);
  EXPECT_EQ(d.node_i(17), 2);
  EXPECT_EQ(d.node_j(17), 3);
  EXPECT_EQ(d.position(1, 2), Point(0.25, 0.5));
  EXPECT_TRUE(d.on_dirichlet(0, 2));
  EXPECT_FALSE(d.on_dirichlet(2, 2));
  const auto s = split_domain(0.25);
  EXPECT_TRUE(s.on_dirichlet(0, 0));
  EXPECT_FALSE(s.on_dirichlet(2, 0));
  EXPECT_TRUE(s.contains(Point(1.0, 0.5)));
  EXPECT_FALSE(s.contains(Point(1.01, 0.5)));
}

TEST(Domain, RejectsBadBoundaryData) {
  EXPECT_THROW(Domain::unit_square(0.3), ValidationError);
  EXPECT_THROW(Domain::unit_square(0.0), ValidationError);
  // Gap on the bottom side.
  EXPECT_THROW(Domain(0, 1, 0, 1, 0.5, {{Side::left, 0, 1}, {Side::right, 0, 1}, {Side::top, 0, 1}},
                      {{Side::bottom, 0, 0.5}}),
               ValidationError);
  // Overlap on the bottom side.
  EXPECT_THROW(Domain(0, 1, 0, 1, 0.5, {{Side::left, 0, 1}, {Side::right, 0, 1}, {Side::top, 0, 1}, {Side::bottom, 0, 0.6}},
                      {{Side::bottom, 0.5, 1}}),
               ValidationError);
  EXPECT_NO_THROW(Domain(0, 1, 0, 1, 0.5, {{Side::left, 0, 1}, {Side::right, 0, 1}, {Side::top, 0, 1}, {Side::bottom, 0, 0.5}},
                         {{Side::bottom, 0.5, 1}}));
  EXPECT_EQ(side_from_string("left"), Side::left);
  EXPECT_EQ(to_string(Side::top), "top");
  EXPECT_THROW(side_from_string("middle"), ValidationError);
}

TEST(Rasterize, ZeroTipGivesEmptyMask) {
  const auto d = Domain::unit_square(1.0 / 16);
  const auto m = rasterize_crack(koch_family({0.0, 0.5}), d, 3);
  EXPECT_EQ(m.severed_count(), 0u);
  EXPECT_EQ(m.depth(), 3);
}

TEST(Rasterize, ShortCrackStaysLocal) {
  const auto d = Domain::unit_square(1.0 / 16);
  const Point x0(0.56, 0.52);
  const auto m = rasterize_crack(koch_family(x0).with_tip(1.0 / 256.0), d, 3);
  EXPECT_GT(m.severed_count(), 0u);
  for (const auto& e : m.severed_edges()) {
    const Point mid = 0.5 * (d.position(e.i1, e.j1) + d.position(e.i2, e.j2));
    EXPECT_LE((mid - x0).lpNorm<Eigen::Infinity>(), 1.0 / 16 + 1e-12);
  }
}

TEST(Rasterize, NodeTouchSeversAllIncidentEdges) {
  const auto d = Domain::unit_square(0.25);
  const std::vector<Point> poly{Point(0.5, 0.5), Point(0.6, 0.6)};
  const auto m = rasterize_polyline(poly, d);
  EXPECT_TRUE(m.horizontal(1, 2));
  EXPECT_TRUE(m.horizontal(2, 2));
  EXPECT_TRUE(m.vertical(2, 1));
  EXPECT_TRUE(m.vertical(2, 2));
}

TEST(Rasterize, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const auto d = Domain::unit_square(1.0 / 32);
  for (int k = 0; k < 20; ++k) {
    std::vector<Point> poly;
    for (int v = 0; v < 6; ++v) poly.emplace_back(u(rng), u(rng));
    EXPECT_EQ(rasterize_polyline(poly, d), brute_force(poly, d));
  }
  const auto crack = koch_family({0.0, 0.3}).with_tip(1.0);
  const auto pts = sample(crack, 4);
  const auto m = rasterize_crack(crack, d, 4);
  EXPECT_TRUE(m.subset_of(brute_force(pts, d)) && brute_force(pts, d).subset_of(m));
}

TEST(Rasterize, NestedTipsGiveNestedMasks) {
  const auto d = Domain::unit_square(1.0 / 32);
  const auto family = koch_family({0.0, 0.4});
  DiscreteCrackMask prev = DiscreteCrackMask::empty(d);
  for (double a = 0.0; a <= 1.0; a += 0.0625) {
    const auto m = rasterize_crack(family.with_tip(a), d, 4);
    EXPECT_TRUE(prev.subset_of(m)) << a;
    prev = m;
  }
}

TEST(Rasterize, Errors) {
  const auto d = Domain::unit_square(1.0 / 32);
  EXPECT_THROW(rasterize_crack(koch_family({0.5, 0.5}).with_tip(1.0), d, 4), GeometryError);
  EXPECT_THROW(rasterize_crack(koch_family({0.0, 0.5}).with_tip(1.0), d, 2), CouplingError);
  EXPECT_NO_THROW(rasterize_crack(koch_family({0.0, 0.5}).with_tip(1.0), d, 2, {false}));
}

TEST(Rasterize, Deterministic) {
  const auto d = Domain::unit_square(1.0 / 64);
  const auto c = koch_family({0.0, 0.5}).with_tip(0.8);
  const auto a = rasterize_crack(c, d, 4), b = rasterize_crack(c, d, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.source_hash(), c.hash());
}

TEST(Mask, IsolationAndEdges) {
  DiscreteCrackMask m(2, 2);
  EXPECT_FALSE(m.node_isolated(0, 0));
  m.sever_horizontal(0, 0);
  EXPECT_FALSE(m.node_isolated(0, 0));
  m.sever_vertical(0, 0);
  EXPECT_TRUE(m.node_isolated(0, 0));
  const auto edges = m.severed_edges();
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0], (GridEdge{0, 0, 1, 0}));
  EXPECT_EQ(edges[1], (GridEdge{0, 0, 0, 1}));
}

TEST(Field, InterpolationAndValidation) {
  const auto d = Domain::unit_square(0.5);
  const auto m = DiscreteCrackMask::empty(d);
  const auto f = interpolate(d, m, Polynomial2{1.0, 2.0, 0.0, 0.0, 0.0, 3.0});
  EXPECT_DOUBLE_EQ(f(d.node(1, 2)), 1.0 + 2.0 * 0.5 + 3.0);
  const auto v = interpolate(d, m, Polynomial2{0, 1}, Polynomial2{0, 0, 1});
  EXPECT_EQ(v.components(), 2);
  EXPECT_DOUBLE_EQ(v(d.node(2, 1), 0), 1.0);
  EXPECT_DOUBLE_EQ(v(d.node(2, 1), 1), 0.5);
  EXPECT_DOUBLE_EQ(f.scaled(2.0)(d.node(1, 2)), 2.0 * f(d.node(1, 2)));
  EXPECT_THROW(Field(d, m, 1, std::vector<double>(3, 0.0)), ValidationError);
  EXPECT_THROW(Field(d, m, 3, std::vector<double>(27, 0.0)), ValidationError);
  std::vector<double> bad(9, 0.0);
  bad[4] = std::nan("");
  EXPECT_THROW(Field(d, m, 1, bad), ValidationError);
}
