#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracgrowth/errors.hpp"
#include "fracgrowth/evolution.hpp"
#include "fracgrowth/fractal_curve.hpp"
#include "oracles.hpp"

using namespace fracgrowth;

namespace {

const AlphaCurve& koch() { return *shared_koch_curve(); }

}  // namespace

TEST(KochCurve, ParametersMatchGenerator) {
  EXPECT_NEAR(koch().alpha(), 1.2618595071429148, 1e-15);
  EXPECT_EQ(koch().ell(), 1.0);
  ASSERT_EQ(koch().branching(), 4u);
  for (const auto& m : koch().maps()) EXPECT_DOUBLE_EQ(m.ratio, 1.0 / 3.0);
  EXPECT_NEAR(moran_sum(koch()), 1.0, 1e-12);
  EXPECT_GT(koch().holder_c(), 0.0);
  EXPECT_LE(koch().holder_c(), koch().holder_C());
}

TEST(KochCurve, NegativeDepthHintRejected) { EXPECT_THROW(koch_curve(-1), DomainError); }

TEST(AlphaCurveValidation, RejectsBrokenIfs) {
  auto maps = koch_maps();
  const double alpha = oracle::kKochAlpha;
  EXPECT_THROW(AlphaCurve::from_ifs({maps[0]}, alpha), ValidationError);
  EXPECT_THROW(AlphaCurve::from_ifs(maps, 1.0), ValidationError);
  EXPECT_THROW(AlphaCurve::from_ifs(maps, 1.3), ValidationError);  // Moran sum off
  auto unequal = maps;
  unequal[1].ratio = 0.3;
  EXPECT_THROW(AlphaCurve::from_ifs(unequal, alpha), ValidationError);
  auto gap = maps;
  gap[2].tx += 1e-3;  // breaks end-to-end connection
  EXPECT_THROW(AlphaCurve::from_ifs(gap, alpha), ValidationError);
  EXPECT_NO_THROW(AlphaCurve::from_ifs(maps, alpha));
}

TEST(AlphaCurveValidation, AcceptsOtherConnectedIfs) {
  // Five-map generator with ratio 1/3 on a staircase: 0->(1/3,0)->(1/3,1/3)->(2/3,1/3)->(2/3,0)->(1,0).
  const double t = 1.0 / 3.0, h = std::numbers::pi / 2.0;
  std::vector<SimilarityMap> maps{{t, 0, 0, 0}, {t, h, t, 0}, {t, 0, t, t}, {t, -h, 2 * t, t}, {t, 0, 2 * t, 0}};
  const double alpha = std::log(5.0) / std::log(3.0);
  const auto curve = AlphaCurve::from_ifs(maps, alpha);
  EXPECT_NEAR(moran_sum(curve), 1.0, 1e-12);
  EXPECT_EQ(prefractal(curve, 2).size(), 26u);
}

TEST(Evaluate, SpecialPoints) {
  const double tol = std::pow(3.0, -12);
  const auto p0 = evaluate(koch(), 0.0, 12);
  EXPECT_EQ(p0.x(), 0.0);
  EXPECT_EQ(p0.y(), 0.0);
  const auto p1 = evaluate(koch(), 1.0, 12);
  EXPECT_NEAR(p1.x(), 1.0, tol);
  EXPECT_NEAR(p1.y(), 0.0, tol);
  const auto apex = evaluate(koch(), 0.5, 12);
  EXPECT_NEAR(apex.x(), 0.5, tol);
  EXPECT_NEAR(apex.y(), std::sqrt(3.0) / 6.0, tol);
  const auto q = evaluate(koch(), 0.25, 12);
  EXPECT_NEAR(q.x(), 1.0 / 3.0, tol);
  EXPECT_NEAR(q.y(), 0.0, tol);
}

TEST(Evaluate, OutOfRangeThrows) {
  EXPECT_THROW(evaluate(koch(), -1e-9, 5), DomainError);
  EXPECT_THROW(evaluate(koch(), 1.0 + 1e-9, 5), DomainError);
  EXPECT_THROW(evaluate(koch(), 0.5, 0), DomainError);
}

TEST(Evaluate, MatchesMapCompositionOracle) {
  const int depth = 7;
  const auto n = koch().cell_count(depth);
  for (unsigned long long m = 0; m < n; m += 37) {
    const double s = static_cast<double>(m) / static_cast<double>(n) + 0.3 / static_cast<double>(n);
    const auto z = oracle::koch_point(oracle::base4_digits(m, depth));
    const auto p = evaluate(koch(), s, depth);
    EXPECT_NEAR(p.x(), z.real(), 1e-14);
    EXPECT_NEAR(p.y(), z.imag(), 1e-14);
  }
}

TEST(Evaluate, RefinementMovesAtMostOneCellDiameter) {
  for (int depth = 1; depth < 10; ++depth)
    for (double s = 0.0; s <= 1.0; s += 0.0123) {
      const double d = (evaluate(koch(), s, depth) - evaluate(koch(), s, depth + 1)).norm();
      EXPECT_LE(d, koch().cell_diameter(depth) * (1 + 1e-12));
    }
}

TEST(Prefractal, LevelsZeroAndOne) {
  const auto p0 = prefractal(koch(), 0);
  ASSERT_EQ(p0.size(), 2u);
  EXPECT_EQ(p0[0], Point(0, 0));
  EXPECT_EQ(p0[1], Point(1, 0));
  const auto p1 = prefractal(koch(), 1);
  ASSERT_EQ(p1.size(), 5u);
  const Point expected[] = {{0, 0}, {1.0 / 3, 0}, {0.5, std::sqrt(3.0) / 6}, {2.0 / 3, 0}, {1, 0}};
  for (int k = 0; k < 5; ++k) EXPECT_LT((p1[k] - expected[k]).norm(), 1e-15);
}

TEST(Prefractal, VertexCountAndOracle) {
  EXPECT_EQ(prefractal(koch(), 5).size(), 1025u);
  const auto p = prefractal(koch(), 6);
  const auto ref = oracle::koch_polyline(6);
  ASSERT_EQ(p.size(), ref.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_NEAR(p[k].x(), ref[k].real(), 1e-13);
    EXPECT_NEAR(p[k].y(), ref[k].imag(), 1e-13);
  }
}

TEST(Prefractal, VerticesEqualEvaluateAtJunctions) {
  for (int n = 1; n <= 6; ++n) {
    const auto p = prefractal(koch(), n);
    for (std::size_t m = 0; m < p.size(); ++m) {
      const auto q = evaluate(koch(), koch().junction_parameter(m, n), n);
      EXPECT_EQ(p[m], q) << "n=" << n << " m=" << m;
    }
  }
}

TEST(Holder, EndpointsBracketOne) {
  const auto est = estimate_holder_constants(koch(), 4, 512, 3);
  EXPECT_GT(est.c_est, 0.0);
  EXPECT_LE(est.c_est, 1.0);
  EXPECT_GE(est.C_est, 1.0);
  EXPECT_GT(est.pairs, 0u);
}

TEST(Holder, DeterministicForSeed) {
  const auto a = estimate_holder_constants(koch(), 4, 1000, 42);
  const auto b = estimate_holder_constants(koch(), 4, 1000, 42);
  EXPECT_EQ(a.c_est, b.c_est);
  EXPECT_EQ(a.C_est, b.C_est);
  EXPECT_THROW(estimate_holder_constants(koch(), 1, 10, 0), DomainError);
  EXPECT_THROW(estimate_holder_constants(koch(), 3, 0, 0), DomainError);
}

TEST(Holder, BoundsHoldOnAllVertexPairs) {
  const int depth = 5;
  const auto est = estimate_holder_constants(koch(), depth, 256, 0);
  const auto p = prefractal(koch(), depth);
  const double n = static_cast<double>(p.size() - 1);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double gap = std::pow(static_cast<double>(j - i) / n, 1.0 / koch().alpha());
      const double d = (p[i] - p[j]).norm();
      EXPECT_GE(d, est.c_est * gap * (1 - 1e-12));
      EXPECT_LE(d, est.C_est * gap * (1 + 1e-12));
    }
}

TEST(Holder, SelfSimilarCellScaling) {
  // Pairs inside the first level-1 cell reproduce the global ratios.
  const auto p = prefractal(koch(), 4);
  const double alpha = koch().alpha();
  const double n = 256.0;
  for (std::size_t i = 0; i < 64; i += 7)
    for (std::size_t j = i + 1; j <= 64; j += 5) {
      const double local = (p[i] - p[j]).norm() / std::pow((j - i) / n, 1.0 / alpha);
      const double global = (p[4 * i] - p[4 * j]).norm() / std::pow(4.0 * (j - i) / n, 1.0 / alpha);
      EXPECT_NEAR(local, global, 1e-12);
    }
}

TEST(Holder, ConstantsStabilize) {
  auto prev = estimate_holder_constants(koch(), 4, 4096, 0);
  for (int d = 5; d <= 7; ++d) {
    const auto est = estimate_holder_constants(koch(), d, 4096, 0);
    EXPECT_LE(std::abs(est.c_est - prev.c_est), 5e-4 * est.c_est) << d;
    EXPECT_LE(std::abs(est.C_est - prev.C_est), 5e-3 * est.C_est) << d;
    prev = est;
  }
}

TEST(MeasureOfArc, ParameterLength) {
  EXPECT_EQ(measure_of_arc(koch(), 0.0, 1.0), 1.0);
  EXPECT_EQ(measure_of_arc(koch(), 0.3, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(measure_of_arc(koch(), 0.2, 0.7), 0.5);
  EXPECT_THROW(measure_of_arc(koch(), 0.7, 0.2), DomainError);
  EXPECT_THROW(measure_of_arc(koch(), -0.1, 0.2), DomainError);
}

TEST(MeasureOfArc, Additive) {
  const double s[] = {0.0, 0.125, 0.25, 0.5, 0.75, 1.0};
  for (double a : s)
    for (double b : s)
      for (double c : s)
        if (a <= b && b <= c)
          EXPECT_EQ(measure_of_arc(koch(), a, b) + measure_of_arc(koch(), b, c), measure_of_arc(koch(), a, c));
}
