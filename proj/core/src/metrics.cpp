// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/metrics.hpp"

#include <stdexcept>

#include "texrecon/inside.hpp"
#include "texrecon/kdtree.hpp"

namespace texrecon {
namespace {

double directed_mean(const std::vector<Vec3>& from, const KdTree& to) {
  double s = 0;
  for (const auto& p : from) s += to.nearest(p).distance;
  return s / static_cast<double>(from.size());
}

}  // namespace

double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chamfer_distance: empty point set");
  const KdTree ta(a), tb(b);
  return 0.5 * (directed_mean(a, tb) + directed_mean(b, ta));
}

double volumetric_iou(const TriangleMesh& a, const TriangleMesh& b, int resolution) {
  const InsideTester ia(a), ib(b);  // throws on non-watertight input
  const Aabb ba = tight_aabb(a), bb = tight_aabb(b);
  const Aabb box{ba.min.cwiseMin(bb.min), ba.max.cwiseMax(bb.max)};
  const Vec3 size = box.size();
  std::size_t inter = 0, uni = 0;
  for (int z = 0; z < resolution; ++z) {
    for (int y = 0; y < resolution; ++y) {
      for (int x = 0; x < resolution; ++x) {
        const Vec3 p = box.min + Vec3((x + 0.5) / resolution, (y + 0.5) / resolution, (z + 0.5) / resolution)
                                     .cwiseProduct(size);
        const bool in_a = ia.contains(p), in_b = ib.contains(p);
        inter += in_a && in_b;
        uni += in_a || in_b;
      }
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

MeshMetrics eval_metrics(const TriangleMesh& a, const TriangleMesh& b, std::size_t sample_count, std::uint64_t seed,
                         bool want_iou) {
  if (a.empty() || b.empty()) throw std::invalid_argument("eval_metrics: both meshes must be non-empty");
  const SurfaceSampleSet sa = sample_surface(a, sample_count, seed);
  const SurfaceSampleSet sb = sample_surface(b, sample_count, seed);
  MeshMetrics m;
  const KdTree ta(sa.points), tb(sb.points);
  m.chamfer = 0.5 * (directed_mean(sa.points, tb) + directed_mean(sb.points, ta));
  if (want_iou) {
    if (!is_watertight(a) || !is_watertight(b)) {
      throw std::invalid_argument("eval_metrics: volumetric IoU requires watertight meshes");
    }
    m.volumetric_iou = volumetric_iou(a, b);
  }
  if (a.has_colors() && b.has_colors()) {
    double s = 0;
    for (std::size_t i = 0; i < sa.points.size(); ++i) {
      s += (sa.colors[i] - sb.colors[tb.nearest(sa.points[i]).index]).cwiseAbs().sum();
    }
    for (std::size_t i = 0; i < sb.points.size(); ++i) {
      s += (sb.colors[i] - sa.colors[ta.nearest(sb.points[i]).index]).cwiseAbs().sum();
    }
    m.texture_mae = 255.0 * s / (3.0 * static_cast<double>(sa.points.size() + sb.points.size()));
  }
  return m;
}

}  // namespace texrecon
