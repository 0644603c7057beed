// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "texrecon/mesh.hpp"
#include "texrecon/sampling.hpp"
#include "texrecon/tensor.hpp"

namespace texrecon {

/// K^3 binary occupancy over `box`, cell (x, y, z) at flat index (z*K + y)*K + x.
/// Optional RGB per cell (mean color of the samples that landed there).
struct OccupancyGrid {
  int resolution = 0;
  Aabb box;
  std::vector<std::uint8_t> cells;
  std::vector<double> colors;  // 3 * K^3 when present

  std::size_t cell_count() const { return cells.size(); }
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * resolution + y) * resolution + x;
  }
  Vec3 cell_center(int x, int y, int z) const;
  std::size_t occupied() const;
  bool has_colors() const { return !colors.empty(); }
};

/// Marks the cell whose center is nearest to each sample (out-of-box samples
/// clamp to the boundary cells). Colors average over the samples per cell.
OccupancyGrid voxelize(const SurfaceSampleSet& samples, int resolution, const Aabb& box);

/// Occupancy as a [1,K,K,K] tensor, or [4,K,K,K] (occupancy, r, g, b) when
/// `with_color` is set.
Tensor grid_tensor(const OccupancyGrid& grid, bool with_color);

/// Stacks [C_i,K,K,K] tensors along the channel axis.
Tensor concat_channels(const std::vector<const Tensor*>& parts);

void save_grid(const std::filesystem::path& path, const OccupancyGrid& grid);
OccupancyGrid load_grid(const std::filesystem::path& path);

}  // namespace texrecon
