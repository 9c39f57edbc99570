#pragma once

#include "swarm/common.hpp"

#include <algorithm>
#include <cstddef>

namespace swarm {

/// Row/column index of a grid cell. Row m grows with y, column n with x.
struct Cell {
  int m = 0;
  int n = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridGeometry {
  int rows = 1;           // M
  int cols = 1;           // N
  double cell = 20.0;     // edge length, m
  Vec2 origin{0.0, 0.0};  // lower-left corner of cell (0, 0)

  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool contains(int m, int n) const { return m >= 0 && m < rows && n >= 0 && n < cols; }
  bool contains(const Cell& c) const { return contains(c.m, c.n); }
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(n);
  }

  Vec2 center(int m, int n) const {
    return {origin.x() + (n + 0.5) * cell, origin.y() + (m + 0.5) * cell};
  }
  Vec2 center(const Cell& c) const { return center(c.m, c.n); }

  /// Cell containing the point, clamped onto the grid for points outside it.
  Cell cell_of(double x, double y) const {
    const int n = static_cast<int>(std::floor((x - origin.x()) / cell));
    const int m = static_cast<int>(std::floor((y - origin.y()) / cell));
    return {std::clamp(m, 0, rows - 1), std::clamp(n, 0, cols - 1)};
  }
};

}  // namespace swarm
