// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/marching_cubes.hpp"

#include <stdexcept>
#include <unordered_map>

namespace texrecon {
namespace detail {
extern const std::int8_t kMcTriTable[256][16];
}  // namespace detail

namespace {

constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

TriangleMesh marching_cubes(std::span<const double> field, int resolution, double iso, const Aabb& box) {
  if (resolution < 2) throw std::invalid_argument("marching_cubes: resolution must be >= 2");
  const auto k = static_cast<std::size_t>(resolution);
  if (field.size() != k * k * k) {
    throw std::invalid_argument("marching_cubes: field has " + std::to_string(field.size()) + " values, expected " +
                                std::to_string(k * k * k));
  }
  const Vec3 step = box.size() / static_cast<double>(resolution - 1);
  const auto node = [k](std::size_t x, std::size_t y, std::size_t z) { return (z * k + y) * k + x; };

  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
  const auto vertex_on_edge = [&](std::size_t a, std::size_t b) -> std::uint32_t {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = static_cast<std::uint64_t>(a) * (k * k * k) + b;
    auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) {
      const double va = field[a], vb = field[b];
      const double t = vb != va ? (iso - va) / (vb - va) : 0.5;
      const auto pos = [&](std::size_t n) {
        const std::size_t x = n % k, y = (n / k) % k, z = n / (k * k);
        return Vec3(box.min.x() + x * step.x(), box.min.y() + y * step.y(), box.min.z() + z * step.z());
      };
      mesh.vertices.push_back(pos(a) + t * (pos(b) - pos(a)));
    }
    return it->second;
  };

  for (std::size_t z = 0; z + 1 < k; ++z) {
    for (std::size_t y = 0; y + 1 < k; ++y) {
      for (std::size_t x = 0; x + 1 < k; ++x) {
        std::size_t ids[8];
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          ids[c] = node(x + kCorner[c][0], y + kCorner[c][1], z + kCorner[c][2]);
          if (field[ids[c]] < iso) cube |= 1 << c;
        }
        if (cube == 0 || cube == 255) continue;
        const auto* row = detail::kMcTriTable[cube];
        for (int i = 0; row[i] != -1; i += 3) {
          Face f{};
          for (int j = 0; j < 3; ++j) {
            const auto& e = kEdge[row[i + j]];
            f[j] = vertex_on_edge(ids[e[0]], ids[e[1]]);
          }
          // Table winding faces the low-valued side; swap to face outward.
          mesh.faces.push_back({f[0], f[1], f[2]});
        }
      }
    }
  }
  return mesh;
}

}  // namespace texrecon
