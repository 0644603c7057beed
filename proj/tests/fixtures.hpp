// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "texrecon/marching_cubes.hpp"
#include "texrecon/mesh.hpp"

namespace fixture {

using texrecon::Aabb;
using texrecon::TriangleMesh;
using texrecon::Vec3;

/// Outward-oriented axis-aligned cube with 8 vertices and 12 faces.
inline TriangleMesh unit_cube(const Vec3& lo = Vec3::Zero(), double side = 1.0) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.push_back(lo + side * Vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

/// Samples `sdf` (negative inside) on a res^3 lattice over `box` and
/// extracts the zero level set.
inline TriangleMesh from_sdf(const std::function<double(const Vec3&)>& sdf, const Aabb& box, int res) {
  std::vector<double> f(std::size_t(res) * res * res);
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        const Vec3 p = box.min + Vec3(x, y, z).cwiseProduct(box.size()) / (res - 1);
        f[(std::size_t(z) * res + y) * res + x] = -sdf(p);
      }
  return texrecon::marching_cubes(f, res, 0.0, box);
}

inline TriangleMesh sphere(const Vec3& c, double r, int res = 48) {
  const Aabb box{c - Vec3::Constant(r * 1.3), c + Vec3::Constant(r * 1.3)};
  return from_sdf([&](const Vec3& p) { return (p - c).norm() - r; }, box, res);
}

}  // namespace fixture
