#include "fracgrowth/field.hpp"

#include <cmath>

#include "fracgrowth/errors.hpp"

namespace fracgrowth {

Field::Field(Domain domain, DiscreteCrackMask mask, int components, std::vector<double> values)
    : domain_(std::move(domain)), mask_(std::move(mask)), components_(components), values_(std::move(values)) {
  if (components_ != 1 && components_ != 2) throw ValidationError("fields have 1 or 2 components");
  if (values_.size() != domain_.node_count() * static_cast<std::size_t>(components_))
    throw ValidationError("field size does not match the grid");
  if (mask_.nx() != domain_.nx() || mask_.ny() != domain_.ny())
    throw ValidationError("mask does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw ValidationError("field values must be finite");
}

Field Field::zeros(const Domain& domain, const DiscreteCrackMask& mask, int components) {
  return Field(domain, mask, components,
               std::vector<double>(domain.node_count() * static_cast<std::size_t>(components), 0.0));
}

Field Field::scaled(double s) const {
  Field out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

Field Field::with_mask(const DiscreteCrackMask& mask) const {
  return Field(domain_, mask, components_, values_);
}

Field interpolate(const Domain& domain, const DiscreteCrackMask& mask, const Polynomial2& w) {
  auto f = Field::zeros(domain, mask, 1);
  for (int j = 0; j <= domain.ny(); ++j)
    for (int i = 0; i <= domain.nx(); ++i) f(domain.node(i, j)) = w(domain.position(i, j));
  return f;
}

Field interpolate(const Domain& domain, const DiscreteCrackMask& mask, const Polynomial2& wx, const Polynomial2& wy) {
  auto f = Field::zeros(domain, mask, 2);
  for (int j = 0; j <= domain.ny(); ++j)
    for (int i = 0; i <= domain.nx(); ++i) {
      const auto n = domain.node(i, j);
      const Point p = domain.position(i, j);
      f(n, 0) = wx(p);
      f(n, 1) = wy(p);
    }
  return f;
}

}  // namespace fracgrowth
