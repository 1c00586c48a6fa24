#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracgrowth/crack_family.hpp"
#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/evolution.hpp"
#include "fracgrowth/field.hpp"
#include "fracgrowth/fractal_curve.hpp"
#include "fracgrowth/geometry.hpp"
#include "fracgrowth/verification.hpp"

namespace fracgrowth {

// CSV output: header row, ',' separator, '.' decimal, LF line endings and
// shortest round-trip formatting of doubles.

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

void write_polyline_csv(std::ostream& out, std::span<const double> s, std::span<const Point> points);
void write_field_csv(std::ostream& out, const Field& u);
void write_mask_csv(std::ostream& out, const DiscreteCrackMask& mask);
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);
void write_content_csv(std::ostream& out, std::span<const double> eps, std::span<const std::size_t> counts,
                       std::span<const double> content);
void write_dimension_csv(std::ostream& out, const DimensionEstimate& estimate);
/// depth,hausdorff,energy,gradient_distance,severed_edges
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
/// depth,eps,N,content; the deep row carries its own depth.
void write_semicontinuity_csv(std::ostream& out, const SemicontinuityReport& report);

/// Throws ValidationError on a malformed trace.
EvolutionTrace read_trace_csv(std::istream& in);

/// {"kind":"koch"} or {"kind":"ifs","maps":[...],"alpha":...,"ell":...}.
std::string curve_to_json(const AlphaCurve& curve);
/// Curve with Hölder constants certified at `holder_depth`.
AlphaCurve curve_from_json(std::string_view text, int holder_depth = 6, std::uint64_t seed = 0);

/// {"curve":...,"psi":[[s,vx,vy],...],"angle":...,"reflect":...,"a":...,"origin":[x,y]}.
std::string crack_to_json(const Crack& crack);
Crack crack_from_json(std::string_view text, int holder_depth = 6, std::uint64_t seed = 0);

}  // namespace fracgrowth
