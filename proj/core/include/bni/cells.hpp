#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

namespace bni {

// Per-outcome-unit values for the four exposure cells, columns ordered
// (z,g) = (1,1), (1,0), (0,1), (0,0).
using CellTable = Eigen::Matrix<double, Eigen::Dynamic, 4>;

constexpr Eigen::Index cell_index(int z, int g) { return (1 - z) * 2 + (1 - g); }

struct Cell {
  int z;
  int g;
};

inline constexpr std::array<Cell, 4> kCells{{{1, 1}, {1, 0}, {0, 1}, {0, 0}}};

}  // namespace bni
