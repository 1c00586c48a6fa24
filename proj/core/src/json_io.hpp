#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "fracgrowth/crack_family.hpp"
#include "fracgrowth/errors.hpp"
#include "fracgrowth/fractal_curve.hpp"
#include "json.hpp"

namespace fracgrowth::detail {

using Json = nlohmann::ordered_json;

Json parse_json(std::string_view text);

/// Throws ValidationError if `obj` is not an object or has a key outside
/// `allowed`.
void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

double get_number(const Json& obj, std::string_view key, std::string_view where);
double get_number(const Json& obj, std::string_view key, std::string_view where, double fallback);
long long get_integer(const Json& obj, std::string_view key, std::string_view where, long long fallback);
bool get_bool(const Json& obj, std::string_view key, std::string_view where, bool fallback);
std::string get_string(const Json& obj, std::string_view key, std::string_view where, std::string fallback);

Json curve_json(const AlphaCurve& curve);
/// Uncertified curve (Hölder constants unset).
AlphaCurve curve_geometry_from(const Json& j);
AlphaCurve certify(const AlphaCurve& curve, int holder_depth, std::uint64_t seed);

Json psi_json(const Perturbation& psi);
Perturbation psi_from(const Json& j, double ell);

}  // namespace fracgrowth::detail
