#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fracgrowth/fractal_curve.hpp"

namespace fracgrowth {

/// Continuous piecewise-linear map psi: [0, ell] -> R^2 with psi(0) = 0,
/// given by its values on a sorted knot list.
class Perturbation {
 public:
  static Perturbation zero(double ell, std::size_t intervals = 64);
  /// Samples `fn` on a uniform grid of `intervals` intervals.
  static Perturbation sampled(double ell, std::size_t intervals,
                              const std::function<Point(double)>& fn);
  /// Throws ValidationError unless knots start at 0, increase strictly and
  /// values[0] == 0.
  static Perturbation from_knots(std::vector<double> knots, std::vector<Point> values);

  Point operator()(double s) const;

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const Point> values() const noexcept { return values_; }
  double ell() const noexcept { return knots_.back(); }

  /// Largest slope over all knot intervals (exact for piecewise-linear maps).
  double lipschitz_constant() const;

  /// Max |psi(s) - other(s)| over s in [0, upto], evaluated at the union of
  /// knots (exact for piecewise-linear maps).
  double max_difference(const Perturbation& other, double upto) const;

 private:
  std::vector<double> knots_;
  std::vector<Point> values_;
};

/// Orthogonal matrix Rot(angle), composed with the reflection y -> -y first
/// when `reflect` is set.
struct Orientation {
  double angle = 0.0;
  bool reflect = false;

  Eigen::Matrix2d matrix() const;
  bool operator==(const Orientation&) const = default;
};

/// One element x0 + (psi + R gamma)[0, a] of the admissible family.
class Crack {
 public:
  /// Validates psi(0) = 0, Lip(psi) <= L, 0 <= a <= ell and that the curve
  /// carries certified Hölder constants.
  Crack(std::shared_ptr<const AlphaCurve> curve, Perturbation psi, Orientation rotation, double a,
        Point origin);

  /// Skips the Lipschitz and tip-range checks. For adversarial tests only.
  static Crack unchecked(std::shared_ptr<const AlphaCurve> curve, Perturbation psi,
                         Orientation rotation, double a, Point origin);

  const AlphaCurve& curve() const noexcept { return *curve_; }
  const std::shared_ptr<const AlphaCurve>& curve_ptr() const noexcept { return curve_; }
  const Perturbation& psi() const noexcept { return psi_; }
  const Orientation& rotation() const noexcept { return rotation_; }
  double a() const noexcept { return a_; }
  const Point& origin() const noexcept { return origin_; }

  /// L = (1/2) c_gamma ell^(-1 + 1/alpha).
  double lipschitz_bound() const;

  /// Same family member with a different tip parameter.
  Crack with_tip(double a) const;

  /// x0 + psi(s) + R gamma(s), gamma evaluated at `depth`.
  Point map(double s, int depth) const;

  /// Stable 64-bit digest of all defining parameters.
  std::uint64_t hash() const;

 private:
  Crack() = default;

  std::shared_ptr<const AlphaCurve> curve_;
  Perturbation psi_;
  Orientation rotation_;
  double a_ = 0.0;
  Point origin_{0.0, 0.0};
};

/// Points x0 + psi(s) + R gamma(s) at every depth-level junction s <= a in
/// increasing order, followed by the tip s = a when a is not a junction.
/// The tip uses the prefractal segment through its cell, so the sample is a
/// prefix of the level-`depth` polyline of the full crack.
std::vector<Point> sample(const Crack& crack, int depth);

/// Parameters matching the points returned by sample().
std::vector<double> sample_parameters(const Crack& crack, int depth);

double alpha_measure(const Crack& crack);

/// K.a - H.a for H a prefix of K; throws PreconditionError otherwise.
double measure_difference(const Crack& K, const Crack& H);

struct Extension {
  Crack crack;
  double lipschitz = 0.0;  ///< re-verified Lipschitz constant of the new psi
};

/// Crack with tip max(H_n.a, K.a) whose perturbation follows H_n up to
/// H_n.a and a translate of K's beyond it. Throws ConstructionError if the
/// result breaks the Lipschitz bound.
Extension extend(const Crack& H_n, const Crack& K);

struct SeparationReport {
  bool pass = false;
  double worst_ratio = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Scans all pairs of depth-level junctions of [0, ell] for the ratio
/// |(psi + R gamma)(s1) - (psi + R gamma)(s2)| / |s1 - s2|^(1/alpha);
/// passes when the minimum is at least c_gamma / 2.
SeparationReport verify_separation(const Crack& crack, int depth);

/// Recovers the tip sigma such that `points` equals sample(crack with a =
/// sigma, depth) within 1e-9. Throws RecognitionError if the points are
/// not such a prefix.
double prefix_recovery(std::span<const Point> points, const Crack& crack, int depth);

}  // namespace fracgrowth
