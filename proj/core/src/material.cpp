#include "fracgrowth/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

Integrand Integrand::quadratic() { return Integrand(Kind::quadratic, 2.0, 0.5, 1.0); }

Integrand Integrand::p_power(double p) { return Integrand(Kind::p_power, p, 1.0 / p, 1.0); }

Integrand::Integrand(Kind kind, double p, double c, double C, double a_offset, double b_offset)
    : kind_(kind), p_(p), c_(c), C_(C), a_offset_(a_offset), b_offset_(b_offset) {
  if (!(p > 1.0 && p <= 2.0)) throw ValidationError(fmt::format("exponent p = {} outside (1, 2]", p));
  if (kind == Kind::quadratic && p != 2.0) throw ValidationError("quadratic integrand needs p = 2");
  if (!(c > 0.0) || !(C >= c)) throw ValidationError("growth constants need 0 < c <= C");
  if (!(a_offset >= 0.0) || !(b_offset >= 0.0)) throw ValidationError("offsets must be non-negative");
}

double Integrand::value(const Eigen::Vector2d& xi) const {
  if (kind_ == Kind::quadratic) return 0.5 * xi.squaredNorm();
  return std::pow(xi.norm(), p_) / p_;
}

Eigen::Vector2d Integrand::gradient(const Eigen::Vector2d& xi) const {
  if (kind_ == Kind::quadratic) return xi;
  const double r = xi.norm();
  if (r == 0.0) return Eigen::Vector2d::Zero();
  return std::pow(r, p_ - 2.0) * xi;
}

Eigen::Matrix2d Integrand::hessian(const Eigen::Vector2d& xi, double floor) const {
  if (kind_ == Kind::quadratic) return Eigen::Matrix2d::Identity();
  const double r = std::max(xi.norm(), floor);
  const double s = std::pow(r, p_ - 2.0);
  if (xi.norm() < floor) return s * Eigen::Matrix2d::Identity();
  const Eigen::Vector2d n = xi / xi.norm();
  return s * (Eigen::Matrix2d::Identity() + (p_ - 2.0) * n * n.transpose());
}

GrowthProbe probe_growth_conditions(const Integrand& f, std::size_t probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> logr(-6.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&] {
    const double r = std::pow(10.0, logr(rng)), t = angle(rng);
    return Eigen::Vector2d(r * std::cos(t), r * std::sin(t));
  };

  GrowthProbe out;
  out.probes = probes;
  const double p = f.p();
  for (std::size_t k = 0; k < probes; ++k) {
    const Eigen::Vector2d xi = draw(), eta = draw();
    const double r = xi.norm();
    const double v = f.value(xi);
    const double slack = 1e-12 * (1.0 + std::abs(v));
    if (v < f.c() * std::pow(r, p) - f.a_offset() - slack) out.lower_bound = false;
    if (v > f.C() * std::pow(r, p) + f.a_offset() + slack) out.upper_bound = false;
    if (f.gradient(xi).norm() > f.C() * std::pow(r, p - 1.0) + f.b_offset() + 1e-12 * (1.0 + std::pow(r, p - 1.0)))
      out.derivative_bound = false;
    const double t = unit(rng);
    const double mid = f.value(t * xi + (1.0 - t) * eta);
    const double chord = t * v + (1.0 - t) * f.value(eta);
    if (mid > chord + 1e-12 * (1.0 + std::abs(chord))) out.convexity = false;
  }
  return out;
}

ElasticityTensor::ElasticityTensor(double lambda, double mu) : lambda_(lambda), mu_(mu) {
  if (!(lambda >= 0.0)) throw ValidationError("Lamé parameter lambda must be >= 0");
  if (!(mu > 0.0)) throw ValidationError("Lamé parameter mu must be > 0");
}

Eigen::Matrix2d ElasticityTensor::apply(const Eigen::Matrix2d& strain) const {
  return 2.0 * mu_ * strain + lambda_ * strain.trace() * Eigen::Matrix2d::Identity();
}

double ElasticityTensor::energy_density(const Eigen::Matrix2d& strain) const {
  return 0.5 * apply(strain).cwiseProduct(strain).sum();
}

EllipticityProbe probe_ellipticity(const ElasticityTensor& tensor, std::size_t probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  EllipticityProbe out;
  out.probes = probes;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < probes; ++k) {
    Eigen::Matrix2d A;
    A(0, 0) = g(rng);
    A(1, 1) = g(rng);
    A(0, 1) = A(1, 0) = g(rng);
    const double n2 = A.squaredNorm();
    if (n2 == 0.0) continue;
    const double q = tensor.apply(A).cwiseProduct(A).sum() / n2;
    out.min_ratio = std::min(out.min_ratio, q);
    out.max_ratio = std::max(out.max_ratio, q);
    if (q < tensor.alpha_C() * (1.0 - 1e-12) || q > tensor.beta_C() * (1.0 + 1e-12)) out.ok = false;
  }
  return out;
}

}  // namespace fracgrowth
