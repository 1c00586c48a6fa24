#include "fracgrowth/serialization.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "fracgrowth/errors.hpp"
#include "json_io.hpp"

namespace fracgrowth {

namespace detail {

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed JSON: {}", e.what()));
  }
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw ValidationError(fmt::format("{} must be a JSON object", where));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError(fmt::format("unknown key \"{}\" in {}", key, where));
  }
}

namespace {

const Json* find(const Json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

}  // namespace

double get_number(const Json& obj, std::string_view key, std::string_view where) {
  const auto* v = find(obj, key);
  if (!v) throw ValidationError(fmt::format("{} needs \"{}\"", where, key));
  if (!v->is_number()) throw ValidationError(fmt::format("{}.{} must be a number", where, key));
  const double d = v->get<double>();
  if (!std::isfinite(d)) throw ValidationError(fmt::format("{}.{} must be finite", where, key));
  return d;
}

double get_number(const Json& obj, std::string_view key, std::string_view where, double fallback) {
  return find(obj, key) ? get_number(obj, key, where) : fallback;
}

long long get_integer(const Json& obj, std::string_view key, std::string_view where, long long fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ValidationError(fmt::format("{}.{} must be an integer", where, key));
  return v->get<long long>();
}

bool get_bool(const Json& obj, std::string_view key, std::string_view where, bool fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ValidationError(fmt::format("{}.{} must be a boolean", where, key));
  return v->get<bool>();
}

std::string get_string(const Json& obj, std::string_view key, std::string_view where, std::string fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ValidationError(fmt::format("{}.{} must be a string", where, key));
  return v->get<std::string>();
}

Json curve_json(const AlphaCurve& curve) {
  if (curve.kind() == "koch") return Json{{"kind", "koch"}};
  Json maps = Json::array();
  for (const auto& m : curve.maps())
    maps.push_back(Json{{"ratio", m.ratio}, {"angle", m.angle}, {"tx", m.tx}, {"ty", m.ty}});
  return Json{{"kind", "ifs"}, {"maps", maps}, {"alpha", curve.alpha()}, {"ell", curve.ell()}};
}

AlphaCurve curve_geometry_from(const Json& j) {
  if (!j.is_object()) throw ValidationError("curve must be a JSON object");
  const auto kind = get_string(j, "kind", "curve", "");
  if (kind == "koch") {
    check_keys(j, {"kind"}, "curve");
    return AlphaCurve::from_ifs(koch_maps(), std::log(4.0) / std::log(3.0), 1.0, "koch");
  }
  if (kind != "ifs") throw ValidationError("curve.kind must be \"koch\" or \"ifs\"");
  check_keys(j, {"kind", "maps", "alpha", "ell"}, "curve");
  const auto it = j.find("maps");
  if (it == j.end() || !it->is_array()) throw ValidationError("curve.maps must be an array");
  std::vector<SimilarityMap> maps;
  for (const auto& m : *it) {
    check_keys(m, {"ratio", "angle", "tx", "ty"}, "curve.maps[]");
    maps.push_back({get_number(m, "ratio", "curve.maps[]"), get_number(m, "angle", "curve.maps[]", 0.0),
                    get_number(m, "tx", "curve.maps[]", 0.0), get_number(m, "ty", "curve.maps[]", 0.0)});
  }
  try {
    return AlphaCurve::from_ifs(std::move(maps), get_number(j, "alpha", "curve"), get_number(j, "ell", "curve", 1.0));
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
}

AlphaCurve certify(const AlphaCurve& curve, int holder_depth, std::uint64_t seed) {
  const auto est = estimate_holder_constants(curve, holder_depth, 4096, seed);
  return curve.with_holder_constants(est.c_est, est.C_est);
}

Json psi_json(const Perturbation& psi) {
  Json out = Json::array();
  for (std::size_t k = 0; k < psi.knots().size(); ++k)
    out.push_back(Json::array({psi.knots()[k], psi.values()[k].x(), psi.values()[k].y()}));
  return out;
}

Perturbation psi_from(const Json& j, double ell) {
  if (j.is_null()) return Perturbation::zero(ell);
  if (!j.is_array()) throw ValidationError("psi must be an array of [s, vx, vy] triples");
  std::vector<double> knots;
  std::vector<Point> values;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() || !row[2].is_number())
      throw ValidationError("psi entries must be [s, vx, vy] numbers");
    knots.push_back(row[0].get<double>());
    values.emplace_back(row[1].get<double>(), row[2].get<double>());
  }
  if (knots.empty()) return Perturbation::zero(ell);
  if (std::abs(knots.back() - ell) > 1e-12 * ell) throw ValidationError("psi knots must end at ell");
  return Perturbation::from_knots(std::move(knots), std::move(values));
}

}  // namespace detail

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("trace line {}: \"{}\" is not a number", line, s));
  }
}

long long parse_integer(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("trace line {}: \"{}\" is not an integer", line, s));
  }
}

constexpr std::string_view kTraceHeader = "i,t,lambda,a,E_elastic,E_surface,E_total,work_cum,solver_iters";

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

void write_polyline_csv(std::ostream& out, std::span<const double> s, std::span<const Point> points) {
  if (s.size() != points.size()) throw ValidationError("parameter and point counts differ");
  out << "s,x,y\n";
  for (std::size_t k = 0; k < points.size(); ++k)
    out << num(s[k]) << ',' << num(points[k].x()) << ',' << num(points[k].y()) << '\n';
}

void write_field_csv(std::ostream& out, const Field& u) {
  const auto& d = u.domain();
  out << (u.components() == 1 ? "i,j,x,y,u\n" : "i,j,x,y,ux,uy\n");
  for (int j = 0; j <= d.ny(); ++j)
    for (int i = 0; i <= d.nx(); ++i) {
      const auto p = d.position(i, j);
      const auto n = d.node(i, j);
      out << i << ',' << j << ',' << num(p.x()) << ',' << num(p.y());
      for (int c = 0; c < u.components(); ++c) out << ',' << num(u(n, c));
      out << '\n';
    }
}

void write_mask_csv(std::ostream& out, const DiscreteCrackMask& mask) {
  out << "i1,j1,i2,j2\n";
  for (const auto& e : mask.severed_edges()) out << e.i1 << ',' << e.j1 << ',' << e.i2 << ',' << e.j2 << '\n';
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records)
    out << r.i << ',' << num(r.t) << ',' << num(r.lambda) << ',' << num(r.a) << ',' << num(r.E_elastic) << ','
        << num(r.E_surface) << ',' << num(r.E_total) << ',' << num(r.work_cum) << ',' << r.solver_iters << '\n';
}

void write_content_csv(std::ostream& out, std::span<const double> eps, std::span<const std::size_t> counts,
                       std::span<const double> content) {
  if (eps.size() != counts.size() || eps.size() != content.size())
    throw ValidationError("content table columns differ in length");
  out << "eps,N,content\n";
  for (std::size_t k = 0; k < eps.size(); ++k) out << num(eps[k]) << ',' << counts[k] << ',' << num(content[k]) << '\n';
}

void write_dimension_csv(std::ostream& out, const DimensionEstimate& estimate) {
  out << "slope,intercept,r2\n"
      << num(estimate.slope) << ',' << num(estimate.intercept) << ',' << num(estimate.r2) << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "depth,hausdorff,energy,gradient_distance,severed_edges\n";
  for (const auto& r : report.records)
    out << r.depth << ',' << num(r.hausdorff_to_finest) << ',' << num(r.energy) << ',' << num(r.gradient_distance)
        << ',' << r.severed_edges << '\n';
}

void write_semicontinuity_csv(std::ostream& out, const SemicontinuityReport& report) {
  out << "depth,eps,N,content\n";
  const auto row = [&](const ContentRow& r) {
    for (std::size_t k = 0; k < report.eps.size(); ++k)
      out << r.depth << ',' << num(report.eps[k]) << ',' << r.counts[k] << ',' << num(r.content[k]) << '\n';
  };
  for (const auto& r : report.rows) row(r);
  row(report.deep);
}

EvolutionTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ValidationError(fmt::format("unexpected trace header \"{}\"", line));
  EvolutionTrace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw ValidationError(fmt::format("trace line {} has {} fields", lineno, f.size()));
    EvolutionRecord r;
    r.i = static_cast<int>(parse_integer(f[0], lineno));
    r.t = parse_double(f[1], lineno);
    r.lambda = parse_double(f[2], lineno);
    r.a = parse_double(f[3], lineno);
    r.E_elastic = parse_double(f[4], lineno);
    r.E_surface = parse_double(f[5], lineno);
    r.E_total = parse_double(f[6], lineno);
    r.work_cum = parse_double(f[7], lineno);
    r.solver_iters = static_cast<long>(parse_integer(f[8], lineno));
    trace.records.push_back(r);
  }
  return trace;
}

std::string curve_to_json(const AlphaCurve& curve) { return detail::curve_json(curve).dump(); }

AlphaCurve curve_from_json(std::string_view text, int holder_depth, std::uint64_t seed) {
  return detail::certify(detail::curve_geometry_from(detail::parse_json(text)), holder_depth, seed);
}

std::string crack_to_json(const Crack& crack) {
  detail::Json j{{"curve", detail::curve_json(crack.curve())},
                 {"psi", detail::psi_json(crack.psi())},
                 {"angle", crack.rotation().angle},
                 {"reflect", crack.rotation().reflect},
                 {"a", crack.a()},
                 {"origin", detail::Json::array({crack.origin().x(), crack.origin().y()})}};
  return j.dump();
}

Crack crack_from_json(std::string_view text, int holder_depth, std::uint64_t seed) {
  const auto j = detail::parse_json(text);
  detail::check_keys(j, {"curve", "psi", "angle", "reflect", "a", "origin"}, "crack");
  if (!j.contains("curve")) throw ValidationError("crack needs \"curve\"");
  auto curve = std::make_shared<const AlphaCurve>(
      detail::certify(detail::curve_geometry_from(j["curve"]), holder_depth, seed));
  Point origin{0.0, 0.0};
  if (j.contains("origin")) {
    const auto& o = j["origin"];
    if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number())
      throw ValidationError("crack.origin must be [x, y]");
    origin = {o[0].get<double>(), o[1].get<double>()};
  }
  auto psi = detail::psi_from(j.contains("psi") ? j["psi"] : detail::Json(), curve->ell());
  return Crack(curve, std::move(psi),
               {detail::get_number(j, "angle", "crack", 0.0), detail::get_bool(j, "reflect", "crack", false)},
               detail::get_number(j, "a", "crack"), origin);
}

}  // namespace fracgrowth
