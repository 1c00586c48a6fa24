#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fracgrowth/crack_family.hpp"
#include "fracgrowth/domain.hpp"

namespace fracgrowth {

/// Grid edge between nodes (i1, j1) and (i2, j2).
struct GridEdge {
  int i1, j1, i2, j2;
  bool operator==(const GridEdge&) const = default;
};

/// Set of severed grid edges representing Omega \ K on a Domain grid.
class DiscreteCrackMask {
 public:
  DiscreteCrackMask() = default;
  /// Empty mask for a grid of nx x ny cells.
  DiscreteCrackMask(int nx, int ny);
  static DiscreteCrackMask empty(const Domain& domain) { return {domain.nx(), domain.ny()}; }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }

  /// Edge (i, j)-(i+1, j).
  bool horizontal(int i, int j) const { return h_[static_cast<std::size_t>(j * nx_ + i)] != 0; }
  /// Edge (i, j)-(i, j+1).
  bool vertical(int i, int j) const { return v_[static_cast<std::size_t>(j * (nx_ + 1) + i)] != 0; }
  void sever_horizontal(int i, int j) { h_[static_cast<std::size_t>(j * nx_ + i)] = 1; }
  void sever_vertical(int i, int j) { v_[static_cast<std::size_t>(j * (nx_ + 1) + i)] = 1; }

  std::size_t severed_count() const;
  /// Severed edges, horizontal first, each group in row-major order.
  std::vector<GridEdge> severed_edges() const;
  bool subset_of(const DiscreteCrackMask& other) const;
  bool node_isolated(int i, int j) const;

  std::uint64_t source_hash() const noexcept { return source_hash_; }
  int depth() const noexcept { return depth_; }
  void set_source(std::uint64_t hash, int depth) {
    source_hash_ = hash;
    depth_ = depth;
  }

  bool operator==(const DiscreteCrackMask& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && h_ == other.h_ && v_ == other.v_;
  }

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<unsigned char> h_, v_;
  std::uint64_t source_hash_ = 0;
  int depth_ = 0;
};

struct RasterOptions {
  /// Require the prefractal segment length ratio^depth <= h. Convergence
  /// studies rasterize deliberately coarse prefractals and switch it off.
  bool enforce_coupling = true;
};

/// Severs every grid edge meeting the level-`depth` crack polyline, touching
/// included. Throws GeometryError if the crack leaves the closed domain and
/// CouplingError if the depth is too coarse for the grid.
DiscreteCrackMask rasterize_crack(const Crack& crack, const Domain& domain, int depth,
                                  RasterOptions options = {});

/// Same severing rule for an arbitrary polyline.
DiscreteCrackMask rasterize_polyline(std::span<const Point> polyline, const Domain& domain);

}  // namespace fracgrowth
