// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "texrecon/mesh.hpp"
#include "texrecon/priors.hpp"

namespace texrecon {

/// Per-region base colors plus a smooth sinusoidal perturbation.
struct TextureSpec {
  std::vector<Vec3> region_colors;
  double noise_amplitude = 0.06;
  double noise_frequency = 3.0;
  Vec3 noise_phase = Vec3::Zero();

  /// Color of region `region` at point p, clamped to [0,1]. Regions past the
  /// end of the list wrap around; an empty list means mid grey.
  Vec3 color(int region, const Vec3& p) const;
};

enum class BodyRegion { kHead = 0, kTorso, kArms, kHands, kLegs, kFeet };
inline constexpr int kBodyRegionCount = 6;
/// Region of each bone (indexed like the bone radii).
const std::array<BodyRegion, kBoneCount>& bone_regions();

struct BodySpec {
  std::uint64_t seed = 0;
  /// Per-bone XYZ Euler angles in radians, applied at the parent joint.
  std::array<Vec3, kBoneCount> angles{};
  /// Per-bone length multipliers.
  std::array<double, kBoneCount> proportions{};
  TextureSpec texture;
  int resolution = 64;

  BodySpec();
};

/// Symmetric per-bone absolute angle limits, radians.
const std::array<Vec3, kBoneCount>& joint_limits();

/// Random pose within `amplitude` times the joint limits, mild proportion
/// jitter and random region colors.
BodySpec random_body_spec(std::uint64_t seed, double amplitude = 0.35);

/// Forward kinematics from the pelvis over the bone tree.
Skeleton25 pose_skeleton(const BodySpec& spec);

struct BodySample {
  TriangleMesh mesh;
  Skeleton25 skeleton;
};

/// Capsule-union body through the posed skeleton, vertex colors by region.
BodySample gen_body(const BodySpec& spec);

enum class PrimitiveKind { kSphere, kBox, kCylinder, kCapsule };

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kSphere;
  Vec3 center = Vec3::Zero();
  /// Sphere: x is the radius. Box: half extents. Cylinder and capsule:
  /// x is the radius, y the half length along `axis`.
  Vec3 size = Vec3::Constant(0.5);
  int axis = 1;

  double sdf(const Vec3& p) const;
  Aabb bounds() const;
};

struct ObjectSpec {
  std::uint64_t seed = 0;
  std::vector<Primitive> parts;
  /// Longest side of the generated mesh's tight box, scene units.
  double scale = 1.0;
  TextureSpec texture;
  int resolution = 96;
};

ObjectSpec random_object_spec(std::uint64_t seed, double min_scale = 0.3, double max_scale = 3.0);

/// Union of the primitives, meshed by marching cubes and rescaled so the
/// longest side equals `scale`. Vertex colors by nearest primitive.
TriangleMesh gen_object(const ObjectSpec& spec);

enum class PartialMode { kHalfspace, kPatches, kBoth };
PartialMode partial_mode_from_string(const std::string& s);
std::string to_string(PartialMode mode);

struct PartialConfig {
  double min_removed = 0.2;
  double max_removed = 0.6;
  int max_retries = 32;
};

/// Drops triangles whose centroid c satisfies dot(normal, c) > offset.
TriangleMesh cut_halfspace(const TriangleMesh& mesh, const Vec3& normal, double offset);

/// Simulated partial scan: whole triangles of `gt` are removed until the
/// removed area fraction lands in the configured window. Vertices are a
/// re-indexed subset of the input.
TriangleMesh make_partial(const TriangleMesh& gt, std::uint64_t seed, PartialMode mode,
                          const PartialConfig& cfg = {});

struct DatasetConfig {
  std::filesystem::path output_dir = "data";
  int bodies = 8;
  int objects = 8;
  std::uint64_t seed = 0;
  /// Train/val/test fractions.
  std::array<double, 3> splits{0.8, 0.1, 0.1};
  PartialMode partial_mode = PartialMode::kHalfspace;
  PartialConfig partial;
  double pose_amplitude = 0.35;
  double min_scale = 0.3;
  double max_scale = 3.0;
  int body_resolution = 64;
  int object_resolution = 96;
  std::string config_hash;
};

struct ManifestEntry {
  std::string id;
  std::string kind;  // "body" or "object"
  std::filesystem::path gt_path;
  std::filesystem::path partial_path;
  std::optional<std::filesystem::path> skeleton_path;
  Aabb tight_box;  // of the partial scan
  Aabb gt_box;     // of the complete mesh
  std::string split;
  std::uint64_t seed = 0;
};

/// Entries plus the directory their relative paths resolve against.
struct DatasetManifest {
  std::filesystem::path root;
  std::string config_hash;
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> split(const std::string& name) const;
  std::filesystem::path resolve(const std::filesystem::path& p) const { return root / p; }
};

/// Split by hash of the id, so adding entries never moves existing ones.
std::string split_for_id(const std::string& id, const std::array<double, 3>& fractions);

/// Generates every mesh and writes manifest.jsonl into the output directory.
DatasetManifest build_dataset(const DatasetConfig& cfg);

/// JSON lines: one header object, then one object per entry.
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

void save_skeleton(const Skeleton25& s, const std::filesystem::path& path);
Skeleton25 load_skeleton(const std::filesystem::path& path);

}  // namespace texrecon
