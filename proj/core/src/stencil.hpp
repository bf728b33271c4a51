#pragma once

#include <cstddef>

#include "helebern/grid.hpp"

namespace helebern::detail {

// Neighbor of a node along one axis; false when it would leave the box.
inline bool neighbor(const GridSpec& g, const Index3& ijk, std::size_t idx, int axis, int dir,
                     std::size_t& out) noexcept {
  const int k = ijk[axis] + dir;
  if (k < 0 || k >= g.nodes[axis]) return false;
  out = dir > 0 ? idx + g.stride(axis) : idx - g.stride(axis);
  return true;
}

// Neighbor index clamped to the box (returns the node itself on a face).
inline std::size_t clamped(const GridSpec& g, const Index3& ijk, std::size_t idx, int axis, int dir) noexcept {
  std::size_t out = idx;
  neighbor(g, ijk, idx, axis, dir, out);
  return out;
}

inline bool interior(const GridSpec& g, const Index3& ijk) noexcept {
  for (int d = 0; d < g.dim; ++d)
    if (ijk[d] == 0 || ijk[d] == g.nodes[d] - 1) return false;
  return true;
}

}  // namespace helebern::detail
