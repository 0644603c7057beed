// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used to check the optimized kernels.
// They share no code with the library beyond the Tensor container.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "texrecon/tensor.hpp"

namespace oracle {

using texrecon::Tensor;

inline Tensor random_tensor(texrecon::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = u(rng);
  return t;
}

inline Tensor conv3d(const Tensor& in, const Tensor& k, const Tensor& b, int pad) {
  const int ci = static_cast<int>(in.dim(0)), d = static_cast<int>(in.dim(1)), h = static_cast<int>(in.dim(2)),
            w = static_cast<int>(in.dim(3));
  const int co = static_cast<int>(k.dim(0)), ks = static_cast<int>(k.dim(2));
  const int od = d + 2 * pad - ks + 1, oh = h + 2 * pad - ks + 1, ow = w + 2 * pad - ks + 1;
  Tensor out({std::size_t(co), std::size_t(od), std::size_t(oh), std::size_t(ow)});
  auto I = [&](int c, int z, int y, int x) { return in.data()[((std::size_t(c) * d + z) * h + y) * w + x]; };
  auto K = [&](int o, int c, int z, int y, int x) {
    return k.data()[(((std::size_t(o) * ci + c) * ks + z) * ks + y) * ks + x];
  };
  for (int o = 0; o < co; ++o)
    for (int z = 0; z < od; ++z)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
          double acc = b.data()[o];
          for (int c = 0; c < ci; ++c)
            for (int dz = 0; dz < ks; ++dz)
              for (int dy = 0; dy < ks; ++dy)
                for (int dx = 0; dx < ks; ++dx) {
                  const int iz = z + dz - pad, iy = y + dy - pad, ix = x + dx - pad;
                  if (iz < 0 || iy < 0 || ix < 0 || iz >= d || iy >= h || ix >= w) continue;
                  acc += I(c, iz, iy, ix) * K(o, c, dz, dy, dx);
                }
          out.data()[((std::size_t(o) * od + z) * oh + y) * ow + x] = acc;
        }
  return out;
}

inline Tensor maxpool3d(const Tensor& in, int win) {
  const std::size_t c = in.dim(0), d = in.dim(1), h = in.dim(2), w = in.dim(3);
  const std::size_t od = d / win, oh = h / win, ow = w / win;
  Tensor out({c, od, oh, ow});
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t z = 0; z < od; ++z)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
          double m = -INFINITY;
          for (int a = 0; a < win; ++a)
            for (int bb = 0; bb < win; ++bb)
              for (int cc = 0; cc < win; ++cc)
                m = std::max(m, in.data()[((ch * d + z * win + a) * h + y * win + bb) * w + x * win + cc]);
          out.data()[((ch * od + z) * oh + y) * ow + x] = m;
        }
  return out;
}

inline Tensor instance_norm(const Tensor& in, double eps) {
  const std::size_t c = in.dim(0), n = in.numel() / c;
  Tensor out(in.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double* x = in.data().data() + ch * n;
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<double>(n);
    double var = 0;
    for (std::size_t i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
    var /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.data()[ch * n + i] = (x[i] - mean) / std::sqrt(var + eps);
  }
  return out;
}

// Cell-center lattice: sample i of R sits at (i + 0.5) / R.
inline std::vector<double> trilinear(const Tensor& grid, double px, double py, double pz) {
  const int c = static_cast<int>(grid.dim(0)), d = static_cast<int>(grid.dim(1)), h = static_cast<int>(grid.dim(2)),
            w = static_cast<int>(grid.dim(3));
  auto coord = [](double p, int r) {
    const double u = std::clamp(p, 0.0, 1.0) * r - 0.5;
    return std::clamp(u, 0.0, static_cast<double>(r - 1));
  };
  const double ux = coord(px, w), uy = coord(py, h), uz = coord(pz, d);
  const int x0 = static_cast<int>(std::floor(ux)), y0 = static_cast<int>(std::floor(uy)),
            z0 = static_cast<int>(std::floor(uz));
  std::vector<double> out(c, 0.0);
  for (int z = z0; z <= std::min(z0 + 1, d - 1); ++z)
    for (int y = y0; y <= std::min(y0 + 1, h - 1); ++y)
      for (int x = x0; x <= std::min(x0 + 1, w - 1); ++x) {
        const double wgt = std::max(0.0, 1.0 - std::abs(ux - x)) * std::max(0.0, 1.0 - std::abs(uy - y)) *
                           std::max(0.0, 1.0 - std::abs(uz - z));
        for (int ch = 0; ch < c; ++ch) out[ch] += wgt * grid.data()[((std::size_t(ch) * d + z) * h + y) * w + x];
      }
  return out;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace oracle

#include <array>
#include <deque>

#include "texrecon/mesh.hpp"
#include "texrecon/sampling.hpp"

namespace oracle {

/// Inside/outside labels at the res^3 cell centers of `box` by exterior flood
/// fill. Cells touched by dense surface samples act as walls; every wall-free
/// cell the fill cannot reach is inside. Returns -1 for wall cells.
inline std::vector<int> flood_fill_labels(const texrecon::TriangleMesh& mesh, const texrecon::Aabb& box, int res) {
  const double cell = (box.size().array() / res).minCoeff();
  const std::size_t samples =
      static_cast<std::size_t>(texrecon::surface_area(mesh) / (cell * cell) * 40.0) + 1000;
  const auto s = texrecon::sample_surface(mesh, samples, 99);
  const std::size_t n = std::size_t(res) * res * res;
  std::vector<int> lab(n, 1);
  auto idx = [res](int x, int y, int z) { return (std::size_t(z) * res + y) * res + x; };
  const texrecon::Vec3 cs = box.size() / res;
  for (const auto& p : s.points) {
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(static_cast<int>(std::floor((p[a] - box.min[a]) / cs[a])), 0, res - 1);
    lab[idx(c[0], c[1], c[2])] = -1;
  }
  std::deque<std::array<int, 3>> q;
  auto push = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= res || y >= res || z >= res) return;
    auto& l = lab[idx(x, y, z)];
    if (l != 1) return;
    l = 0;
    q.push_back({x, y, z});
  };
  for (int a = 0; a < res; ++a)
    for (int b = 0; b < res; ++b) {
      push(0, a, b), push(res - 1, a, b), push(a, 0, b), push(a, res - 1, b), push(a, b, 0), push(a, b, res - 1);
    }
  while (!q.empty()) {
    auto [x, y, z] = q.front();
    q.pop_front();
    push(x + 1, y, z), push(x - 1, y, z), push(x, y + 1, z), push(x, y - 1, z), push(x, y, z + 1), push(x, y, z - 1);
  }
  return lab;
}

}  // namespace oracle
