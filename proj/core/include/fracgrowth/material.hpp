#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace fracgrowth {

/// Bulk energy density f(x, xi) for the antiplane (scalar) problem:
/// quadratic f = |xi|^2 / 2 or p_power f = |xi|^p / p with 1 < p <= 2.
///
/// The growth constants c, C and the offsets a, b are the ones of the
/// bounds c|xi|^p - a <= f <= C|xi|^p + a and |D f| <= C|xi|^(p-1) + b;
/// neither density depends on x, so the offsets default to 0.
class Integrand {
 public:
  enum class Kind { quadratic, p_power };

  static Integrand quadratic();
  static Integrand p_power(double p);

  /// Throws ValidationError for p outside (1, 2], non-positive c, C < c,
  /// negative offsets, or kind quadratic with p != 2.
  Integrand(Kind kind, double p, double c, double C, double a_offset = 0.0, double b_offset = 0.0);

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  double c() const noexcept { return c_; }
  double C() const noexcept { return C_; }
  double a_offset() const noexcept { return a_offset_; }
  double b_offset() const noexcept { return b_offset_; }

  double value(const Eigen::Vector2d& xi) const;
  /// Gradient in xi; 0 at xi = 0.
  Eigen::Vector2d gradient(const Eigen::Vector2d& xi) const;
  /// Hessian in xi with |xi| floored at `floor` (the p_power Hessian is
  /// singular at the origin for p < 2).
  Eigen::Matrix2d hessian(const Eigen::Vector2d& xi, double floor = 1e-8) const;

 private:
  Kind kind_;
  double p_, c_, C_, a_offset_, b_offset_;
};

struct GrowthProbe {
  std::size_t probes = 0;
  bool lower_bound = true;
  bool upper_bound = true;
  bool derivative_bound = true;
  bool convexity = true;
  bool ok() const { return lower_bound && upper_bound && derivative_bound && convexity; }
};

/// Checks the growth bounds and convexity (on random secants) at random
/// probes xi.
GrowthProbe probe_growth_conditions(const Integrand& f, std::size_t probes, std::uint64_t seed);

/// Isotropic elasticity tensor C A = 2 mu A + lambda tr(A) I on symmetric
/// 2x2 matrices, with alpha_C |A|^2 <= C A : A <= beta_C |A|^2.
class ElasticityTensor {
 public:
  ElasticityTensor(double lambda, double mu);

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double alpha_C() const noexcept { return 2.0 * mu_; }
  double beta_C() const noexcept { return 2.0 * mu_ + 2.0 * lambda_; }

  Eigen::Matrix2d apply(const Eigen::Matrix2d& strain) const;
  /// (1/2) C E : E.
  double energy_density(const Eigen::Matrix2d& strain) const;

 private:
  double lambda_, mu_;
};

struct EllipticityProbe {
  std::size_t probes = 0;
  double min_ratio = 0.0;  ///< min of C A:A / |A|^2 over the probes
  double max_ratio = 0.0;
  bool ok = true;
};

EllipticityProbe probe_ellipticity(const ElasticityTensor& tensor, std::size_t probes, std::uint64_t seed);

}  // namespace fracgrowth
