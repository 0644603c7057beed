// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace texrecon {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

/// Axis-aligned box given by its min and max corners.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 size() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double volume() const;
  bool degenerate() const;
  bool contains(const Vec3& p) const;
  /// Grows every axis whose extent is below `min_extent` symmetrically to it.
  Aabb padded(double min_extent) const;
  static Aabb from_center_size(const Vec3& center, const Vec3& size);
};

/// Intersection-over-union of two boxes.
double box_iou(const Aabb& a, const Aabb& b);

/// Indexed triangle surface. Colors are optional, per vertex, in [0,1].
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> colors;

  bool empty() const { return faces.empty(); }
  bool has_colors() const { return !colors.empty(); }
  /// Throws std::invalid_argument on out-of-range indices, NaN coordinates or
  /// a color array of the wrong length.
  void validate() const;
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const TriangleMesh& mesh);
/// Signed enclosed volume; positive for outward-oriented closed surfaces.
double signed_volume(const TriangleMesh& mesh);
Vec3 face_centroid(const TriangleMesh& mesh, std::size_t f);

/// Componentwise vertex min/max. Throws on an empty vertex set.
Aabb tight_aabb(const TriangleMesh& mesh);

/// Every undirected edge is used by exactly two faces.
bool is_watertight(const TriangleMesh& mesh);
/// Every directed edge appears once and is matched by its reverse.
bool is_consistently_oriented(const TriangleMesh& mesh);
/// V - E + F over the referenced vertices.
long euler_characteristic(const TriangleMesh& mesh);

/// Merges vertices closer than `tolerance` (grid-hashed, first vertex wins)
/// and re-indexes faces. Colors of merged vertices keep the first value.
TriangleMesh weld_vertices(const TriangleMesh& mesh, double tolerance);

/// Drops vertices no face references.
TriangleMesh compact(const TriangleMesh& mesh);

/// Concatenates meshes, offsetting indices. Colors are kept only when every
/// part has them.
TriangleMesh merge_meshes(const std::vector<const TriangleMesh*>& parts);

class MeshIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads OBJ (optional "v x y z r g b" colors in [0,1]) or ASCII PLY.
TriangleMesh load_mesh(const std::filesystem::path& path);
/// Writes OBJ or ASCII PLY by extension. Floats use the shortest text that
/// round-trips exactly.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

std::string mesh_to_obj(const TriangleMesh& mesh);
TriangleMesh mesh_from_obj(const std::string& text);

}  // namespace texrecon
