#include "fracgrowth/crack_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

namespace {

constexpr double kLipschitzSlack = 1e-12;
constexpr double kRecoveryTolerance = 1e-9;

class Fnv1a {
 public:
  void add(const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    add(&v, sizeof v);
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// Number of depth-level junctions in [0, a], minus one.
std::uint64_t last_junction(const AlphaCurve& curve, double a, int depth) {
  const auto n = curve.cell_count(depth);
  const double x = a / curve.ell() * static_cast<double>(n);
  const double nearest = std::nearbyint(x);
  const double snap = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x);
  const double v = std::abs(x - nearest) <= snap ? nearest : std::floor(x);
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(0.0, v)), n);
}

bool tip_is_junction(const AlphaCurve& curve, double a, int depth) {
  const auto m = last_junction(curve, a, depth);
  return a - curve.junction_parameter(m, depth) <= 1e-14 * curve.ell();
}

void require_same_family(const Crack& K, const Crack& H) {
  if (!K.curve().same_geometry(H.curve())) throw PreconditionError("cracks use different curves");
  if ((K.origin() - H.origin()).norm() > 1e-12) throw PreconditionError("cracks use different origins");
  if (!(K.rotation() == H.rotation())) throw PreconditionError("cracks use different orientations");
}

}  // namespace

// --- Perturbation ----------------------------------------------------------

Perturbation Perturbation::zero(double ell, std::size_t intervals) {
  return sampled(ell, intervals, [](double) { return Point{0.0, 0.0}; });
}

Perturbation Perturbation::sampled(double ell, std::size_t intervals,
                                   const std::function<Point(double)>& fn) {
  if (!(ell > 0.0)) throw ValidationError("perturbation range must be positive");
  if (intervals < 1) throw ValidationError("perturbation needs at least one interval");
  std::vector<double> knots(intervals + 1);
  std::vector<Point> values(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    knots[i] = i == intervals ? ell : ell * static_cast<double>(i) / static_cast<double>(intervals);
    values[i] = i == 0 ? Point{0.0, 0.0} : fn(knots[i]);
  }
  return from_knots(std::move(knots), std::move(values));
}

Perturbation Perturbation::from_knots(std::vector<double> knots, std::vector<Point> values) {
  if (knots.size() < 2 || knots.size() != values.size())
    throw ValidationError("perturbation needs matching knot and value lists of length >= 2");
  if (knots.front() != 0.0) throw ValidationError("perturbation knots must start at 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw ValidationError("perturbation knots must increase strictly");
  for (const auto& v : values)
    if (!v.allFinite()) throw ValidationError("perturbation values must be finite");
  if (values.front().norm() != 0.0) throw ValidationError("perturbation must vanish at s = 0");
  Perturbation p;
  p.knots_ = std::move(knots);
  p.values_ = std::move(values);
  return p;
}

Point Perturbation::operator()(double s) const {
  s = std::clamp(s, 0.0, ell());
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  if (it == knots_.end()) return values_.back();
  const auto j = static_cast<std::size_t>(it - knots_.begin());
  const double t = (s - knots_[j - 1]) / (knots_[j] - knots_[j - 1]);
  return (1.0 - t) * values_[j - 1] + t * values_[j];
}

double Perturbation::lipschitz_constant() const {
  double lip = 0.0;
  for (std::size_t i = 1; i < knots_.size(); ++i)
    lip = std::max(lip, (values_[i] - values_[i - 1]).norm() / (knots_[i] - knots_[i - 1]));
  return lip;
}

double Perturbation::max_difference(const Perturbation& other, double upto) const {
  std::vector<double> at;
  for (double s : knots_)
    if (s <= upto) at.push_back(s);
  for (double s : other.knots_)
    if (s <= upto) at.push_back(s);
  at.push_back(upto);
  double diff = 0.0;
  for (double s : at) diff = std::max(diff, ((*this)(s) - other(s)).norm());
  return diff;
}

// --- Orientation / Crack ----------------------------------------------------

Eigen::Matrix2d Orientation::matrix() const {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  if (reflect) rot.col(1) *= -1.0;
  return rot;
}

Crack::Crack(std::shared_ptr<const AlphaCurve> curve, Perturbation psi, Orientation rotation,
             double a, Point origin)
    : Crack(unchecked(std::move(curve), std::move(psi), rotation, a, std::move(origin))) {
  if (!(curve_->holder_c() > 0.0))
    throw ValidationError("curve carries no certified Hölder constant");
  if (!(a_ >= 0.0 && a_ <= curve_->ell()))
    throw ValidationError(fmt::format("tip parameter {} outside [0, {}]", a_, curve_->ell()));
  const double lip = psi_.lipschitz_constant();
  const double bound = lipschitz_bound();
  if (lip > bound * (1.0 + kLipschitzSlack))
    throw ValidationError(fmt::format("perturbation Lipschitz constant {} exceeds L = {}", lip, bound));
}

Crack Crack::unchecked(std::shared_ptr<const AlphaCurve> curve, Perturbation psi,
                       Orientation rotation, double a, Point origin) {
  if (!curve) throw ValidationError("crack needs a curve");
  if (std::abs(psi.ell() - curve->ell()) > 1e-12 * curve->ell())
    throw ValidationError("perturbation range differs from the curve's parameter length");
  if (!origin.allFinite() || !std::isfinite(a) || !std::isfinite(rotation.angle))
    throw ValidationError("crack parameters must be finite");
  Crack c;
  c.curve_ = std::move(curve);
  c.psi_ = std::move(psi);
  c.rotation_ = rotation;
  c.a_ = a;
  c.origin_ = std::move(origin);
  return c;
}

double Crack::lipschitz_bound() const {
  return 0.5 * curve_->holder_c() * std::pow(curve_->ell(), -1.0 + 1.0 / curve_->alpha());
}

Crack Crack::with_tip(double a) const {
  return Crack(curve_, psi_, rotation_, a, origin_);
}

Point Crack::map(double s, int depth) const {
  return origin_ + psi_(s) + rotation_.matrix() * evaluate(*curve_, s, depth);
}

std::uint64_t Crack::hash() const {
  Fnv1a h;
  h.add(curve_->alpha());
  h.add(curve_->ell());
  for (const auto& m : curve_->maps()) {
    h.add(m.ratio);
    h.add(m.angle);
    h.add(m.tx);
    h.add(m.ty);
  }
  for (std::size_t i = 0; i < psi_.knots().size(); ++i) {
    h.add(psi_.knots()[i]);
    h.add(psi_.values()[i].x());
    h.add(psi_.values()[i].y());
  }
  h.add(rotation_.angle);
  h.add(rotation_.reflect ? 1.0 : 0.0);
  h.add(a_);
  h.add(origin_.x());
  h.add(origin_.y());
  return h.value();
}

// --- operations -------------------------------------------------------------

std::vector<double> sample_parameters(const Crack& crack, int depth) {
  if (depth < 1) throw DomainError("sample needs depth >= 1");
  const auto& curve = crack.curve();
  const auto last = last_junction(curve, crack.a(), depth);
  std::vector<double> s;
  s.reserve(last + 2);
  for (std::uint64_t m = 0; m <= last; ++m) s.push_back(curve.junction_parameter(m, depth));
  if (!tip_is_junction(curve, crack.a(), depth)) s.push_back(crack.a());
  return s;
}

std::vector<Point> sample(const Crack& crack, int depth) {
  const auto params = sample_parameters(crack, depth);
  const auto& curve = crack.curve();
  const auto last = last_junction(curve, crack.a(), depth);
  const Eigen::Matrix2d rot = crack.rotation().matrix();

  // Only the prefix of the prefractal up to the tip cell is needed.
  const auto poly = prefractal(curve, depth);
  std::vector<Point> pts;
  pts.reserve(params.size());
  for (std::uint64_t m = 0; m <= last; ++m)
    pts.push_back(crack.origin() + crack.psi()(params[m]) + rot * poly[m]);
  if (params.size() > last + 1) {
    const double cell = curve.ell() / static_cast<double>(curve.cell_count(depth));
    const double theta = (crack.a() - params[last]) / cell;
    const Point g = poly[last] + theta * (poly[last + 1] - poly[last]);
    pts.push_back(crack.origin() + crack.psi()(crack.a()) + rot * g);
  }
  return pts;
}

double alpha_measure(const Crack& crack) { return crack.a(); }

double measure_difference(const Crack& K, const Crack& H) {
  require_same_family(K, H);
  if (H.a() > K.a()) throw PreconditionError("H is not contained in K: H.a > K.a");
  if (K.psi().max_difference(H.psi(), H.a()) > 1e-12)
    throw PreconditionError("perturbations differ on [0, H.a]");
  return K.a() - H.a();
}

Extension extend(const Crack& H_n, const Crack& K) {
  require_same_family(K, H_n);
  const double a = H_n.a();
  const double b = std::max(a, K.a());
  const Point shift = H_n.psi()(a) - K.psi()(a);

  std::vector<double> knots;
  std::vector<Point> values;
  for (std::size_t i = 0; i < H_n.psi().knots().size(); ++i) {
    const double s = H_n.psi().knots()[i];
    if (s > a) break;
    knots.push_back(s);
    values.push_back(H_n.psi().values()[i]);
  }
  if (knots.back() < a) {
    knots.push_back(a);
    values.push_back(H_n.psi()(a));
  }
  for (std::size_t i = 0; i < K.psi().knots().size(); ++i) {
    const double s = K.psi().knots()[i];
    if (s <= knots.back()) continue;
    knots.push_back(s);
    values.push_back(K.psi().values()[i] + shift);
  }

  auto psi = Perturbation::from_knots(std::move(knots), std::move(values));
  const double lip = psi.lipschitz_constant();
  const double bound = H_n.lipschitz_bound();
  if (lip > bound * (1.0 + kLipschitzSlack))
    throw ConstructionError(
        fmt::format("extended perturbation has Lipschitz constant {} > L = {}", lip, bound));
  return {Crack(H_n.curve_ptr(), std::move(psi), H_n.rotation(), b, H_n.origin()), lip};
}

SeparationReport verify_separation(const Crack& crack, int depth) {
  if (depth < 2) throw DomainError("verify_separation needs depth >= 2");
  const auto& curve = crack.curve();
  const auto poly = prefractal(curve, depth);
  const std::size_t n = poly.size() - 1;
  const Eigen::Matrix2d rot = crack.rotation().matrix();
  const double inv_alpha = 1.0 / curve.alpha();

  std::vector<Point> pts(poly.size());
  for (std::size_t m = 0; m <= n; ++m)
    pts[m] = crack.psi()(curve.junction_parameter(m, depth)) + rot * poly[m];
  std::vector<double> scale(n + 1);
  for (std::size_t m = 1; m <= n; ++m)
    scale[m] = std::pow(static_cast<double>(m) / static_cast<double>(n) * curve.ell(), inv_alpha);

  SeparationReport rep{false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      const double r = (pts[i] - pts[j]).norm() / scale[j - i];
      if (r < rep.worst_ratio) {
        rep.worst_ratio = r;
        rep.s1 = curve.junction_parameter(i, depth);
        rep.s2 = curve.junction_parameter(j, depth);
      }
    }
  }
  rep.pass = rep.worst_ratio >= 0.5 * curve.holder_c();
  return rep;
}

double prefix_recovery(std::span<const Point> points, const Crack& crack, int depth) {
  if (points.empty()) throw RecognitionError("empty point list");
  const auto& curve = crack.curve();
  const Crack full_crack = crack.with_tip(curve.ell());
  const auto full = sample(full_crack, depth);
  const auto params = sample_parameters(full_crack, depth);
  const double tol = kRecoveryTolerance * std::max(1.0, curve.diameter());

  if ((points.front() - crack.origin()).norm() > tol)
    throw RecognitionError("point list does not start at the crack origin");
  if (points.size() > full.size()) throw RecognitionError("point list longer than the full crack sample");

  const std::size_t n = points.size();
  std::size_t matched = 0;
  while (matched < n && (points[matched] - full[matched]).norm() <= tol) ++matched;

  double sigma = 0.0;
  if (matched == n) {
    sigma = params[n - 1];
  } else if (matched == n - 1 && n >= 2 && n < full.size()) {
    // Tip inside cell [params[n-2], params[n-1]]; the map is affine between
    // consecutive breakpoints of psi.
    const double s0 = params[n - 2], s1 = params[n - 1];
    std::vector<double> breaks{s0};
    for (double k : crack.psi().knots())
      if (k > s0 && k < s1) breaks.push_back(k);
    breaks.push_back(s1);

    const auto poly_point = [&](double s) -> Point {
      const double theta = (s - s0) / (s1 - s0);
      const Point g = full[n - 2] - crack.origin() - crack.psi()(s0);
      const Point h = full[n - 1] - crack.origin() - crack.psi()(s1);
      return crack.origin() + crack.psi()(s) + (1.0 - theta) * g + theta * h;
    };
    const Point q = points[n - 1];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      const Point p0 = poly_point(breaks[b]), p1 = poly_point(breaks[b + 1]);
      const Point d = p1 - p0;
      const double len2 = d.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((q - p0).dot(d) / len2, 0.0, 1.0) : 0.0;
      const double dist = (p0 + t * d - q).norm();
      if (dist < best) {
        best = dist;
        sigma = breaks[b] + t * (breaks[b + 1] - breaks[b]);
      }
    }
    if (best > tol) throw RecognitionError("last point does not lie on the crack");
  } else {
    throw RecognitionError(fmt::format("point {} deviates from the crack sample", matched));
  }

  const auto check = sample(crack.with_tip(sigma), depth);
  if (check.size() != n) throw RecognitionError("recovered prefix has a different length");
  for (std::size_t i = 0; i < n; ++i)
    if ((check[i] - points[i]).norm() > tol) throw RecognitionError("recovered prefix does not reproduce the points");
  return sigma;
}

}  // namespace fracgrowth
