// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace texrecon {

SurfaceSampleSet sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample_surface: count must be >= 1");
  std::vector<double> cdf(mesh.faces.size());
  double total = 0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    cdf[f] = total;
  }
  if (!(total > 0)) throw std::invalid_argument("sample_surface: mesh has zero surface area");

  SurfaceSampleSet out;
  out.seed = seed;
  out.points.reserve(count);
  out.normals.reserve(count);
  out.faces.reserve(count);
  if (mesh.has_colors()) out.colors.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double pick = uni(rng) * total;
    auto f = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin());
    f = std::min(f, cdf.size() - 1);
    // Skip zero-area faces that upper_bound may land on at exact ties.
    while (f > 0 && cdf[f] == cdf[f - 1]) --f;
    const double r1 = std::sqrt(uni(rng));
    const double r2 = uni(rng);
    const double w0 = 1.0 - r1, w1 = r1 * (1.0 - r2), w2 = r1 * r2;
    const auto& t = mesh.faces[f];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    out.points.push_back(w0 * a + w1 * b + w2 * c);
    Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    out.normals.push_back(len > 0 ? Vec3(n / len) : Vec3::UnitZ());
    out.faces.push_back(static_cast<std::uint32_t>(f));
    if (mesh.has_colors()) out.colors.push_back(w0 * mesh.colors[t[0]] + w1 * mesh.colors[t[1]] + w2 * mesh.colors[t[2]]);
  }
  return out;
}

TriangleMesh SimilarityTransform::apply(const TriangleMesh& mesh) const {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = apply(v);
  return out;
}

TriangleMesh SimilarityTransform::invert(const TriangleMesh& mesh) const {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = invert(v);
  return out;
}

Aabb normalized_target_box() { return {Vec3::Constant(0.05), Vec3::Constant(0.95)}; }

SimilarityTransform fit_box(const Aabb& source, const Aabb& target) {
  if (!source.min.allFinite() || !source.max.allFinite() || source.degenerate()) {
    throw std::invalid_argument("fit_box: degenerate source box");
  }
  const Vec3 ssize = source.size();
  const Vec3 tsize = target.size();
  const double scale = (tsize.array() / ssize.array()).minCoeff();
  SimilarityTransform t;
  t.scale = scale;
  t.offset = target.center() - scale * source.center();
  return t;
}

std::pair<TriangleMesh, SimilarityTransform> normalize_to_box(const TriangleMesh& mesh, const Aabb& target) {
  const Aabb box = tight_aabb(mesh).padded(kDegeneratePad);
  const SimilarityTransform t = fit_box(box, target);
  return {t.apply(mesh), t};
}

}  // namespace texrecon
