// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/completion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "texrecon/kdtree.hpp"
#include "texrecon/ops.hpp"

namespace texrecon {

QueryBatch sample_shape_queries(const TriangleMesh& gt, std::size_t count, std::span<const double> sigmas,
                                std::uint64_t seed) {
  const InsideTester inside(gt);
  return sample_shape_queries(gt, inside, count, sigmas, seed);
}

QueryBatch sample_shape_queries(const TriangleMesh& gt, const InsideTester& inside, std::size_t count,
                                std::span<const double> sigmas, std::uint64_t seed) {
  if (sigmas.empty()) throw std::invalid_argument("sample_shape_queries: need at least one sigma");
  if (count < sigmas.size()) throw std::invalid_argument("sample_shape_queries: count smaller than sigma count");
  for (double s : sigmas) {
    if (!(s >= 0)) throw std::invalid_argument("sample_shape_queries: sigmas must be >= 0");
  }
  const SurfaceSampleSet surf = sample_surface(gt, count, seed);
  QueryBatch q;
  q.sigmas.assign(sigmas.begin(), sigmas.end());
  q.points.reserve(3 * count);
  q.labels.reserve(count);
  std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t per = count / sigmas.size();
  for (std::size_t i = 0; i < count; ++i) {
    const double sigma = sigmas[std::min(i / per, sigmas.size() - 1)];
    Vec3 p = surf.points[i];
    for (int a = 0; a < 3; ++a) p[a] += sigma * normal(rng);
    q.points.insert(q.points.end(), {p.x(), p.y(), p.z()});
    q.labels.push_back(inside.contains(p) ? 1.0 : 0.0);
  }
  return q;
}

QueryBatch sample_texture_queries(const TriangleMesh& gt, std::size_t count, double normal_sigma, std::uint64_t seed) {
  if (!gt.has_colors()) throw std::invalid_argument("sample_texture_queries: mesh has no colors");
  if (!(normal_sigma >= 0)) throw std::invalid_argument("sample_texture_queries: normal_sigma must be >= 0");
  const SurfaceSampleSet surf = sample_surface(gt, count, seed);
  QueryBatch q;
  q.sigmas = {normal_sigma};
  q.points.reserve(3 * count);
  q.labels.reserve(3 * count);
  std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 p = surf.points[i] + normal_sigma * normal(rng) * surf.normals[i];
    q.points.insert(q.points.end(), {p.x(), p.y(), p.z()});
    const Vec3 c = surf.colors[i].cwiseMax(0.0).cwiseMin(1.0);
    q.labels.insert(q.labels.end(), {c.x(), c.y(), c.z()});
  }
  return q;
}

MlpSpec decoder_spec(const std::string& prefix, std::size_t feature_width, const std::vector<std::size_t>& hidden,
                     std::size_t outputs) {
  MlpSpec spec{prefix, {feature_width}};
  spec.widths.insert(spec.widths.end(), hidden.begin(), hidden.end());
  spec.widths.push_back(outputs);
  return spec;
}

TensorPtr shape_decode(Tape& tape, const ParamStore& store, const MlpSpec& spec, const TensorPtr& features) {
  if (spec.out_width() != 1) throw std::invalid_argument("shape_decode: decoder must have one output");
  const TensorPtr logits = mlp_forward(tape, store, spec, features);
  return reshape(tape, sigmoid(tape, logits), {logits->dim(0)});
}

TensorPtr texture_decode(Tape& tape, const ParamStore& store, const MlpSpec& spec, const TensorPtr& features) {
  if (spec.out_width() != 3) throw std::invalid_argument("texture_decode: decoder must have three outputs");
  return sigmoid(tape, mlp_forward(tape, store, spec, features));
}

BceWeights bce_weights(std::span<const double> labels, BceWeighting mode) {
  if (labels.empty()) throw std::invalid_argument("bce_weights: empty label batch");
  if (mode == BceWeighting::kUniform) return {1.0, 1.0};
  double ones = 0;
  for (double o : labels) {
    if (o != 0.0 && o != 1.0) throw std::invalid_argument("bce_weights: labels must be 0 or 1");
    ones += o;
  }
  const double frac_one = ones / static_cast<double>(labels.size());
  const double frac_zero = 1.0 - frac_one;
  BceWeights w = mode == BceWeighting::kInverseFrequency ? BceWeights{frac_zero, frac_one}
                                                          : BceWeights{frac_one, frac_zero};
  w.positive = std::max(w.positive, kMinClassWeight);
  w.negative = std::max(w.negative, kMinClassWeight);
  return w;
}

TensorPtr balanced_bce(Tape& tape, const TensorPtr& pred, std::span<const double> labels, BceWeighting mode) {
  const BceWeights w = bce_weights(labels, mode);
  return weighted_bce(tape, pred, labels, w.positive, w.negative);
}

TensorPtr texture_loss(Tape& tape, const TensorPtr& pred, std::span<const double> labels) {
  if (pred->rank() != 2 || pred->dim(1) != 3) {
    throw std::invalid_argument("texture_loss: prediction must be [N,3], got " + shape_to_string(pred->shape()));
  }
  if (labels.size() != pred->numel()) throw std::invalid_argument("texture_loss: label count mismatch");
  return row_l1_mean(tape, pred, labels);
}

TriangleMesh shape_fusion(const TriangleMesh& predicted, const TriangleMesh& partial, double tau) {
  if (predicted.empty() || partial.empty()) throw std::invalid_argument("shape_fusion: both meshes must be non-empty");
  if (!(tau > 0)) throw std::invalid_argument("shape_fusion: tau must be > 0");
  constexpr double kWeld = 1e-6;

  // Vertices plus a dense area sample so large partial triangles are covered.
  std::vector<Vec3> scan = partial.vertices;
  const double area = surface_area(partial);
  if (area > 0) {
    const auto n = static_cast<std::size_t>(std::clamp(4.0 * area / (tau * tau), 1000.0, 400000.0));
    const SurfaceSampleSet s = sample_surface(partial, n, 0x9e3779b97f4a7c15ULL);
    scan.insert(scan.end(), s.points.begin(), s.points.end());
  }
  const KdTree scan_tree(std::move(scan));
  const KdTree vertex_tree(partial.vertices);

  TriangleMesh out;
  out.vertices = partial.vertices;
  out.faces = partial.faces;
  const bool colored = partial.has_colors();
  if (colored) out.colors = partial.colors;

  std::vector<std::int64_t> remap(predicted.vertices.size(), -1);
  auto vertex = [&](std::uint32_t v) -> std::uint32_t {
    if (remap[v] < 0) {
      const auto hit = vertex_tree.nearest(predicted.vertices[v]);
      if (hit.distance <= kWeld) {
        remap[v] = static_cast<std::int64_t>(hit.index);
      } else {
        remap[v] = static_cast<std::int64_t>(out.vertices.size());
        out.vertices.push_back(predicted.vertices[v]);
        if (colored) out.colors.push_back(predicted.has_colors() ? predicted.colors[v] : Vec3::Constant(0.5));
      }
    }
    return static_cast<std::uint32_t>(remap[v]);
  };
  for (std::size_t f = 0; f < predicted.faces.size(); ++f) {
    if (scan_tree.nearest(face_centroid(predicted, f)).distance <= tau) continue;
    const Face& t = predicted.faces[f];
    const Face nf{vertex(t[0]), vertex(t[1]), vertex(t[2])};
    if (nf[0] == nf[1] || nf[1] == nf[2] || nf[0] == nf[2]) continue;
    out.faces.push_back(nf);
  }
  return out;
}

SimilarityTransform frame_for_box(const Aabb& box) {
  return fit_box(box.padded(kDegeneratePad), normalized_target_box());
}

OccupancyGrid voxelize_in_frame(const TriangleMesh& mesh, const SimilarityTransform& frame, int resolution,
                                std::size_t samples, std::uint64_t seed) {
  SurfaceSampleSet s = sample_surface(mesh, samples, seed);
  for (auto& p : s.points) p = frame.apply(p);
  return voxelize(s, resolution, {Vec3::Zero(), Vec3::Ones()});
}

std::vector<double> lattice_points(int resolution) {
  if (resolution < 2) throw std::invalid_argument("lattice_points: resolution must be >= 2");
  const auto k = static_cast<std::size_t>(resolution);
  std::vector<double> pts;
  pts.reserve(3 * k * k * k);
  const double h = 1.0 / static_cast<double>(resolution - 1);
  for (std::size_t z = 0; z < k; ++z) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t x = 0; x < k; ++x) {
        pts.insert(pts.end(), {static_cast<double>(x) * h, static_cast<double>(y) * h, static_cast<double>(z) * h});
      }
    }
  }
  return pts;
}

namespace {

template <class Fn>
void for_chunks(std::span<const double> points, std::size_t chunk, Fn&& fn) {
  if (points.size() % 3 != 0) throw std::invalid_argument("decode: point array length must be a multiple of 3");
  if (chunk == 0) throw std::invalid_argument("decode: chunk must be >= 1");
  const std::size_t n = points.size() / 3;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    fn(points.subspan(3 * begin, 3 * (end - begin)));
  }
}

}  // namespace

std::vector<double> decode_occupancy(const MultiScaleFeatures& msf, const ParamStore& store, const MlpSpec& spec,
                                     int pe_bands, std::span<const double> points, std::size_t chunk) {
  std::vector<double> out;
  out.reserve(points.size() / 3);
  for_chunks(points, chunk, [&](std::span<const double> part) {
    Tape tape;
    const TensorPtr p = shape_decode(tape, store, spec, query_features(tape, msf, part, pe_bands));
    out.insert(out.end(), p->data().begin(), p->data().end());
  });
  return out;
}

std::vector<Vec3> decode_colors(const MultiScaleFeatures& msf, const ParamStore& store, const MlpSpec& spec,
                                int pe_bands, std::span<const double> points, std::size_t chunk) {
  std::vector<Vec3> out;
  out.reserve(points.size() / 3);
  for_chunks(points, chunk, [&](std::span<const double> part) {
    Tape tape;
    const TensorPtr c = texture_decode(tape, store, spec, query_features(tape, msf, part, pe_bands));
    const auto d = c->data();
    for (std::size_t i = 0; i + 2 < d.size(); i += 3) out.emplace_back(d[i], d[i + 1], d[i + 2]);
  });
  return out;
}

}  // namespace texrecon
