// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "texrecon/container.hpp"

namespace texrecon {

Vec3 OccupancyGrid::cell_center(int x, int y, int z) const {
  const Vec3 frac((x + 0.5) / resolution, (y + 0.5) / resolution, (z + 0.5) / resolution);
  return box.min + frac.cwiseProduct(box.size());
}

std::size_t OccupancyGrid::occupied() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

OccupancyGrid voxelize(const SurfaceSampleSet& samples, int resolution, const Aabb& box) {
  if (resolution < 8) throw std::invalid_argument("voxelize: resolution must be >= 8");
  if (samples.points.empty()) throw std::invalid_argument("voxelize: no samples");
  if (box.degenerate()) throw std::invalid_argument("voxelize: degenerate box");
  OccupancyGrid g;
  g.resolution = resolution;
  g.box = box;
  const std::size_t n = static_cast<std::size_t>(resolution) * resolution * resolution;
  g.cells.assign(n, 0);
  const bool colored = !samples.colors.empty();
  std::vector<double> sums;
  std::vector<std::uint32_t> counts;
  if (colored) {
    sums.assign(3 * n, 0.0);
    counts.assign(n, 0);
  }
  const Vec3 size = box.size();
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    int c[3];
    for (int a = 0; a < 3; ++a) {
      const double u = (samples.points[i][a] - box.min[a]) / size[a] * resolution;
      c[a] = std::isfinite(u) ? static_cast<int>(std::clamp(std::floor(u), 0.0, resolution - 1.0)) : 0;
    }
    const std::size_t idx = g.index(c[0], c[1], c[2]);
    g.cells[idx] = 1;
    if (colored) {
      for (int a = 0; a < 3; ++a) sums[3 * idx + a] += samples.colors[i][a];
      ++counts[idx];
    }
  }
  if (colored) {
    g.colors.assign(3 * n, 0.0);
    for (std::size_t idx = 0; idx < n; ++idx) {
      if (!counts[idx]) continue;
      for (int a = 0; a < 3; ++a) g.colors[3 * idx + a] = sums[3 * idx + a] / counts[idx];
    }
  }
  return g;
}

Tensor grid_tensor(const OccupancyGrid& grid, bool with_color) {
  if (with_color && !grid.has_colors()) throw std::invalid_argument("grid_tensor: grid has no colors");
  const auto k = static_cast<std::size_t>(grid.resolution);
  const std::size_t n = k * k * k;
  Tensor t({with_color ? 4u : 1u, k, k, k});
  auto d = t.data();
  for (std::size_t i = 0; i < n; ++i) d[i] = grid.cells[i];
  if (with_color) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < 3; ++a) d[(a + 1) * n + i] = grid.colors[3 * i + a];
    }
  }
  return t;
}

Tensor concat_channels(const std::vector<const Tensor*>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_channels: no inputs");
  Shape shape = parts.front()->shape();
  std::size_t channels = 0;
  std::vector<double> values;
  for (const auto* p : parts) {
    if (p->rank() != 4 || !std::equal(p->shape().begin() + 1, p->shape().end(), shape.begin() + 1)) {
      throw std::invalid_argument("concat_channels: spatial shape mismatch " + shape_to_string(p->shape()));
    }
    channels += p->dim(0);
    values.insert(values.end(), p->data().begin(), p->data().end());
  }
  shape[0] = channels;
  return Tensor(std::move(shape), std::move(values));
}

void save_grid(const std::filesystem::path& path, const OccupancyGrid& grid) {
  Container c;
  c.kind = "grid";
  c.attributes["resolution"] = std::to_string(grid.resolution);
  const auto k = static_cast<std::size_t>(grid.resolution);
  c.tensors.push_back({"box", Tensor({2, 3}, {grid.box.min.x(), grid.box.min.y(), grid.box.min.z(), grid.box.max.x(),
                                              grid.box.max.y(), grid.box.max.z()})});
  c.tensors.push_back({"occupancy", Tensor({k, k, k}, std::vector<double>(grid.cells.begin(), grid.cells.end()))});
  if (grid.has_colors()) c.tensors.push_back({"color", Tensor({k, k, k, 3}, grid.colors)});
  write_container(path, c);
}

OccupancyGrid load_grid(const std::filesystem::path& path) {
  const Container c = read_container(path);
  if (c.kind != "grid") throw std::runtime_error("load_grid: " + path.string() + " holds a '" + c.kind + "'");
  OccupancyGrid g;
  g.resolution = std::stoi(c.attributes.at("resolution"));
  const auto b = c.at("box").data();
  g.box = {Vec3(b[0], b[1], b[2]), Vec3(b[3], b[4], b[5])};
  const auto occ = c.at("occupancy").data();
  g.cells.resize(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) g.cells[i] = occ[i] != 0.0 ? 1 : 0;
  if (const auto* col = c.find("color")) g.colors = col->to_vector();
  return g;
}

}  // namespace texrecon
