// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "texrecon/marching_cubes.hpp"
#include "texrecon/ops.hpp"

namespace texrecon {

const std::array<std::string_view, kJointCount>& Skeleton25::names() {
  static const std::array<std::string_view, kJointCount> kNames{
      "pelvis",     "spine1",     "spine2",  "spine3",  "neck",    "head",       "head_top",
      "l_clavicle", "l_shoulder", "l_elbow", "l_wrist", "l_hand",  "r_clavicle", "r_shoulder",
      "r_elbow",    "r_wrist",    "r_hand",  "l_hip",   "l_knee",  "l_ankle",    "l_foot",
      "r_hip",      "r_knee",     "r_ankle", "r_foot"};
  return kNames;
}

const std::array<int, kJointCount>& Skeleton25::parents() {
  static const std::array<int, kJointCount> kParents{-1, 0,  1,  2,  3, 4,  5,  3,  7,  8,  9,  10, 3,
                                                     12, 13, 14, 15, 0, 17, 18, 19, 0, 21, 22, 23};
  return kParents;
}

int Skeleton25::index_of(std::string_view name) {
  const auto& n = names();
  const auto it = std::find(n.begin(), n.end(), name);
  if (it == n.end()) throw std::invalid_argument("skeleton: unknown joint '" + std::string(name) + "'");
  return static_cast<int>(it - n.begin());
}

std::vector<double> Skeleton25::flat() const {
  std::vector<double> out(3 * kJointCount);
  for (int j = 0; j < kJointCount; ++j)
    for (int a = 0; a < 3; ++a) out[3 * j + a] = joints[j][a];
  return out;
}

Skeleton25 Skeleton25::from_flat(std::span<const double> values) {
  if (values.size() != 3 * kJointCount) {
    throw std::invalid_argument("skeleton: expected 75 values, got " + std::to_string(values.size()));
  }
  Skeleton25 s;
  for (int j = 0; j < kJointCount; ++j) s.joints[j] = Vec3(values[3 * j], values[3 * j + 1], values[3 * j + 2]);
  return s;
}

Skeleton25 Skeleton25::transformed(double scale, const Vec3& offset) const {
  Skeleton25 s;
  for (int j = 0; j < kJointCount; ++j) s.joints[j] = scale * joints[j] + offset;
  return s;
}

Skeleton25 rest_skeleton() {
  Skeleton25 s;
  auto set = [&](std::string_view name, double x, double y, double z) { s.joints[Skeleton25::index_of(name)] = Vec3(x, y, z); };
  set("pelvis", 0, 1.0, 0);
  set("spine1", 0, 1.1, 0);
  set("spine2", 0, 1.22, 0);
  set("spine3", 0, 1.36, 0);
  set("neck", 0, 1.5, 0);
  set("head", 0, 1.6, 0);
  set("head_top", 0, 1.78, 0);
  const double arm[] = {0.08, 0.2, 0.48, 0.74, 0.84};
  const char* larm[] = {"l_clavicle", "l_shoulder", "l_elbow", "l_wrist", "l_hand"};
  const char* rarm[] = {"r_clavicle", "r_shoulder", "r_elbow", "r_wrist", "r_hand"};
  for (int i = 0; i < 5; ++i) {
    set(larm[i], arm[i], 1.46, 0);
    set(rarm[i], -arm[i], 1.46, 0);
  }
  for (double side : {1.0, -1.0}) {
    const std::string p = side > 0 ? "l_" : "r_";
    set(p + "hip", 0.1 * side, 0.95, 0);
    set(p + "knee", 0.1 * side, 0.52, 0);
    set(p + "ankle", 0.1 * side, 0.1, 0);
    set(p + "foot", 0.1 * side, 0.03, 0.12);
  }
  return s;
}

std::array<double, kBoneCount> default_bone_radii() {
  // Indexed by child joint - 1.
  std::array<double, kBoneCount> r{};
  const double spine[] = {0.15, 0.15, 0.14, 0.06, 0.07, 0.1};
  for (int i = 0; i < 6; ++i) r[i] = spine[i];
  const double arm[] = {0.07, 0.07, 0.065, 0.055, 0.05};
  for (int i = 0; i < 5; ++i) r[6 + i] = r[11 + i] = arm[i];
  const double leg[] = {0.12, 0.09, 0.07, 0.05};
  for (int i = 0; i < 4; ++i) r[16 + i] = r[20 + i] = leg[i];
  return r;
}

double Capsule::distance(const Vec3& p) const {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm() - radius;
}

std::vector<Capsule> skeleton_capsules(const Skeleton25& skel, std::span<const double> radii) {
  if (radii.size() != kBoneCount) {
    throw std::invalid_argument("skeleton: expected 24 bone radii, got " + std::to_string(radii.size()));
  }
  std::vector<Capsule> caps;
  caps.reserve(kBoneCount);
  const auto& par = Skeleton25::parents();
  for (int j = 1; j < kJointCount; ++j) {
    if (!skel.joints[j].allFinite()) throw std::invalid_argument("skeleton: non-finite joint");
    if (!(radii[j - 1] > 0)) throw std::invalid_argument("skeleton: bone radii must be positive");
    caps.push_back({skel.joints[par[j]], skel.joints[j], radii[j - 1]});
  }
  return caps;
}

double capsule_union_sdf(const std::vector<Capsule>& caps, const Vec3& p, int* which) {
  double best = std::numeric_limits<double>::infinity();
  int bi = -1;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    const double d = caps[i].distance(p);
    if (d < best) best = d, bi = static_cast<int>(i);
  }
  if (which) *which = bi;
  return best;
}

TriangleMesh capsules_to_mesh(const std::vector<Capsule>& caps, int resolution) {
  if (caps.empty()) throw std::invalid_argument("capsules_to_mesh: no capsules");
  if (resolution < 8) throw std::invalid_argument("capsules_to_mesh: resolution must be >= 8");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const auto& c : caps) {
    lo = lo.cwiseMin(c.a - Vec3::Constant(c.radius)).cwiseMin(c.b - Vec3::Constant(c.radius));
    hi = hi.cwiseMax(c.a + Vec3::Constant(c.radius)).cwiseMax(c.b + Vec3::Constant(c.radius));
  }
  const double h = (hi - lo).maxCoeff() / (resolution - 5);
  const Vec3 center = 0.5 * (lo + hi);
  const Aabb box = Aabb::from_center_size(center, Vec3::Constant(h * (resolution - 1)));
  const std::size_t k = static_cast<std::size_t>(resolution);
  std::vector<double> field(k * k * k);
  for (std::size_t z = 0; z < k; ++z)
    for (std::size_t y = 0; y < k; ++y)
      for (std::size_t x = 0; x < k; ++x) {
        const Vec3 p = box.min + h * Vec3(double(x), double(y), double(z));
        field[(z * k + y) * k + x] = -capsule_union_sdf(caps, p);
      }
  return marching_cubes(field, resolution, 0.0, box);
}

TriangleMesh skeleton_to_prior_mesh(const Skeleton25& skel, std::span<const double> radii, int resolution) {
  return capsules_to_mesh(skeleton_capsules(skel, radii), resolution);
}

std::size_t head_output_width(HeadKind kind) { return kind == HeadKind::kPose ? 3 * kJointCount : 6; }

HeadKind head_kind_from_string(const std::string& name) {
  if (name == "pose") return HeadKind::kPose;
  if (name == "bbox") return HeadKind::kBbox;
  throw std::invalid_argument("global_head: unknown head '" + name + "' (expected pose or bbox)");
}

std::string to_string(HeadKind kind) { return kind == HeadKind::kPose ? "pose" : "bbox"; }

namespace {

MlpSpec head_trunk(const std::string& prefix, std::size_t top_channels, const HeadConfig& cfg) {
  MlpSpec spec{prefix + "/cell", {top_channels}};
  spec.widths.insert(spec.widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  return spec;
}

}  // namespace

void init_global_head(ParamStore& store, const std::string& prefix, std::size_t top_channels, HeadKind kind,
                      const HeadConfig& cfg, std::mt19937_64& rng, std::span<const double> output_bias) {
  if (cfg.hidden.empty()) throw std::invalid_argument("global_head: needs at least one hidden width");
  init_mlp(store, head_trunk(prefix, top_channels, cfg), rng);
  const std::size_t out = head_output_width(kind), fin = cfg.hidden.back();
  auto w = store.add_he_uniform(prefix + "/out/w", {out, fin}, fin, rng);
  for (auto& v : w->data()) v *= kHeadOutputScale;
  auto b = store.add_zeros(prefix + "/out/b", {out});
  if (!output_bias.empty()) {
    if (output_bias.size() != out) throw std::invalid_argument("global_head: output bias has the wrong width");
    std::copy(output_bias.begin(), output_bias.end(), b->data().begin());
  }
}

TensorPtr global_head(Tape& tape, const MultiScaleFeatures& msf, const ParamStore& store, const std::string& prefix,
                      HeadKind kind, const HeadConfig& cfg) {
  if (msf.grids.empty()) throw std::invalid_argument("global_head: empty feature pyramid");
  const TensorPtr& top = msf.top();
  auto cells = grid_to_rows(tape, top);
  auto h = relu(tape, mlp_forward(tape, store, head_trunk(prefix, top->dim(0), cfg), cells));
  auto pooled = reshape(tape, max_rows(tape, h), {1, cfg.hidden.back()});
  auto out = linear(tape, pooled, store.get(prefix + "/out/w"), store.get(prefix + "/out/b"));
  return reshape(tape, out, {head_output_width(kind)});
}

namespace {

void require_finite_box(const Aabb& b, const char* what) {
  if (!b.min.allFinite() || !b.max.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite box");
}

}  // namespace

Aabb rel_to_abs(const RelBox& rel, const Aabb& tight) {
  require_finite_box(tight, "rel_to_abs");
  if (tight.degenerate()) throw std::invalid_argument("rel_to_abs: degenerate tight box");
  for (double v : rel)
    if (!std::isfinite(v)) throw std::invalid_argument("rel_to_abs: non-finite relative box");
  const Vec3 ts = tight.size();
  const Vec3 center = tight.center() + Vec3(rel[0], rel[1], rel[2]).cwiseProduct(ts);
  const Vec3 size(ts.x() * std::exp(rel[3]), ts.y() * std::exp(rel[4]), ts.z() * std::exp(rel[5]));
  return Aabb::from_center_size(center, size);
}

RelBox abs_to_rel(const Aabb& abs, const Aabb& tight) {
  require_finite_box(tight, "abs_to_rel");
  require_finite_box(abs, "abs_to_rel");
  if (tight.degenerate() || abs.degenerate()) throw std::invalid_argument("abs_to_rel: degenerate box");
  const Vec3 ts = tight.size();
  const Vec3 off = (abs.center() - tight.center()).cwiseQuotient(ts);
  const Vec3 as = abs.size();
  return {off.x(), off.y(), off.z(), std::log(as.x() / ts.x()), std::log(as.y() / ts.y()), std::log(as.z() / ts.z())};
}

bool completeness_test(const Aabb& abs, const RelBox& rel, const CompletenessThresholds& th) {
  const Vec3 s = abs.size();
  if (!(s.minCoeff() > 0)) throw std::invalid_argument("completeness_test: absolute box has a zero extent");
  const double aspect = s.maxCoeff() / s.minCoeff();
  const double r0 = std::exp(rel[3]), r1 = std::exp(rel[4]), r2 = std::exp(rel[5]);
  const double growth = std::max({r0, r1, r2}) / std::min({r0, r1, r2});
  return aspect > th.t1 || growth > th.t2;
}

TensorPtr pose_loss(Tape& tape, const TensorPtr& pred, const Skeleton25& gt) {
  if (pred->numel() != 3 * kJointCount) {
    throw std::invalid_argument("pose_loss: prediction must hold 75 values, got " + shape_to_string(pred->shape()));
  }
  const auto target = gt.flat();
  return row_l1_mean(tape, reshape(tape, pred, {kJointCount, 3}), target);
}

double pose_loss(const Skeleton25& pred, const Skeleton25& gt) {
  double s = 0;
  for (int j = 0; j < kJointCount; ++j) s += (pred.joints[j] - gt.joints[j]).lpNorm<1>();
  return s / kJointCount;
}

TensorPtr bbox_loss(Tape& tape, const TensorPtr& pred, const RelBox& gt) {
  if (pred->numel() != 6) throw std::invalid_argument("bbox_loss: prediction must hold 6 values");
  return row_l1_mean(tape, reshape(tape, pred, {1, 6}), gt);
}

double bbox_loss(const RelBox& pred, const RelBox& gt) {
  double s = 0;
  for (int i = 0; i < 6; ++i) s += std::abs(pred[i] - gt[i]);
  return s;
}

}  // namespace texrecon
