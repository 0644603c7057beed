// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texrecon/encoder.hpp"
#include "texrecon/mesh.hpp"
#include "texrecon/mlp.hpp"
#include "texrecon/param_store.hpp"

namespace texrecon {

inline constexpr int kJointCount = 25;
inline constexpr int kBoneCount = kJointCount - 1;

/// 25 joint positions in a fixed kinematic tree rooted at the pelvis.
/// Bone b connects joint b + 1 to its parent.
struct Skeleton25 {
  std::array<Vec3, kJointCount> joints;

  static const std::array<std::string_view, kJointCount>& names();
  static const std::array<int, kJointCount>& parents();
  static int index_of(std::string_view name);

  /// Row-major 25 x 3 values.
  std::vector<double> flat() const;
  static Skeleton25 from_flat(std::span<const double> values);
  Skeleton25 transformed(double scale, const Vec3& offset) const;
};

/// Standing T-pose in scene units (pelvis at height 1, +y up, +x to the
/// body's left, +z forward).
Skeleton25 rest_skeleton();

/// Per-bone capsule radii of the template body, scene units.
std::array<double, kBoneCount> default_bone_radii();

/// Segment with a rounded cap at both ends.
struct Capsule {
  Vec3 a, b;
  double radius = 0;

  double distance(const Vec3& p) const;
};

std::vector<Capsule> skeleton_capsules(const Skeleton25& skel, std::span<const double> radii);

/// Signed distance to a union of capsules; `which` receives the index of the
/// closest capsule when non-null.
double capsule_union_sdf(const std::vector<Capsule>& caps, const Vec3& p, int* which = nullptr);

/// Marching cubes on the union's signed distance over `resolution`^3 nodes
/// spanning the capsules' bounds plus a two-cell margin.
TriangleMesh capsules_to_mesh(const std::vector<Capsule>& caps, int resolution = 64);

/// Capsule body through the skeleton joints, one capsule per bone.
TriangleMesh skeleton_to_prior_mesh(const Skeleton25& skel, std::span<const double> radii, int resolution = 64);

enum class HeadKind { kPose, kBbox };

std::size_t head_output_width(HeadKind kind);
HeadKind head_kind_from_string(const std::string& name);
std::string to_string(HeadKind kind);

struct HeadConfig {
  std::vector<std::size_t> hidden{128, 128};
};

inline constexpr double kHeadOutputScale = 0.01;

/// Per-cell MLP on the top grid, ReLU, global max over cells, then an affine
/// map to the output width. `output_bias` seeds the final bias; the final
/// weights start at kHeadOutputScale times a He-uniform draw, so an untrained
/// head predicts close to that bias.
void init_global_head(ParamStore& store, const std::string& prefix, std::size_t top_channels, HeadKind kind,
                      const HeadConfig& cfg, std::mt19937_64& rng, std::span<const double> output_bias = {});

/// Output [output width]: 75 joint coordinates or the 6 relative-box values.
TensorPtr global_head(Tape& tape, const MultiScaleFeatures& msf, const ParamStore& store, const std::string& prefix,
                      HeadKind kind, const HeadConfig& cfg);

/// Relative box [x_r, y_r, z_r, l_r, w_r, h_r]: center offsets in units of
/// the tight size and log size ratios.
using RelBox = std::array<double, 6>;

Aabb rel_to_abs(const RelBox& rel, const Aabb& tight);
RelBox abs_to_rel(const Aabb& abs, const Aabb& tight);

struct CompletenessThresholds {
  double t1 = 2.5;
  double t2 = 1.2;
};

/// True when completion should run: the absolute box aspect exceeds t1, or
/// the ratio between the largest and smallest predicted/tight size ratio
/// exceeds t2. Both comparisons are strict.
bool completeness_test(const Aabb& abs, const RelBox& rel, const CompletenessThresholds& th);

/// Mean over joints of the per-joint L1 distance.
TensorPtr pose_loss(Tape& tape, const TensorPtr& pred, const Skeleton25& gt);
double pose_loss(const Skeleton25& pred, const Skeleton25& gt);

/// L1 norm of the 6-vector difference in the relative parametrization.
TensorPtr bbox_loss(Tape& tape, const TensorPtr& pred, const RelBox& gt);
double bbox_loss(const RelBox& pred, const RelBox& gt);

}  // namespace texrecon
