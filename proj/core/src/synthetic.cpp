// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/synthetic.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "texrecon/hash.hpp"
#include "texrecon/marching_cubes.hpp"

namespace texrecon {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

Vec3 TextureSpec::color(int region, const Vec3& p) const {
  if (region < 0) throw std::out_of_range("texture: negative region");
  const Vec3 base = region_colors.empty() ? Vec3::Constant(0.5) : region_colors[region % region_colors.size()];
  const double f = noise_frequency;
  const double n = std::sin(f * p.x() + noise_phase.x()) * std::sin(f * p.y() + noise_phase.y()) +
                   0.5 * std::sin(f * p.z() + noise_phase.z());
  return (base + Vec3::Constant(noise_amplitude * n)).cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

Vec3 random_color(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.15, 0.9);
  return Vec3(u(rng), u(rng), u(rng));
}

TextureSpec random_texture(std::mt19937_64& rng, int regions) {
  TextureSpec t;
  for (int i = 0; i < regions; ++i) t.region_colors.push_back(random_color(rng));
  std::uniform_real_distribution<double> ph(0, 2 * M_PI);
  t.noise_phase = Vec3(ph(rng), ph(rng), ph(rng));
  return t;
}

// Bone index = child joint - 1.
constexpr int kLeftArm = 6, kRightArm = 11, kLeftLeg = 16, kRightLeg = 20;

}  // namespace

const std::array<BodyRegion, kBoneCount>& bone_regions() {
  static const std::array<BodyRegion, kBoneCount> kRegions = [] {
    std::array<BodyRegion, kBoneCount> r{};
    r.fill(BodyRegion::kTorso);
    r[4] = r[5] = BodyRegion::kHead;
    for (int side : {kLeftArm, kRightArm}) {
      r[side + 1] = r[side + 2] = r[side + 3] = BodyRegion::kArms;
      r[side + 4] = BodyRegion::kHands;
    }
    for (int side : {kLeftLeg, kRightLeg}) {
      r[side + 1] = r[side + 2] = BodyRegion::kLegs;
      r[side + 3] = BodyRegion::kFeet;
    }
    return r;
  }();
  return kRegions;
}

BodySpec::BodySpec() {
  angles.fill(Vec3::Zero());
  proportions.fill(1.0);
  texture.region_colors = {Vec3(0.85, 0.65, 0.5), Vec3(0.2, 0.35, 0.7), Vec3(0.85, 0.65, 0.5),
                           Vec3(0.8, 0.6, 0.45),  Vec3(0.25, 0.25, 0.3), Vec3(0.1, 0.1, 0.1)};
}

const std::array<Vec3, kBoneCount>& joint_limits() {
  static const std::array<Vec3, kBoneCount> kLimits = [] {
    std::array<Vec3, kBoneCount> l{};
    l[0] = Vec3(0.3, 0.3, 0.3);
    l[1] = l[2] = Vec3(0.2, 0.2, 0.2);
    l[3] = Vec3(0.4, 0.5, 0.4);
    l[4] = Vec3(0.3, 0.3, 0.3);
    l[5] = Vec3::Zero();
    for (int side : {kLeftArm, kRightArm}) {
      l[side] = Vec3(0.2, 0.2, 0.2);
      l[side + 1] = Vec3(1.2, 1.2, 1.2);
      l[side + 2] = Vec3(0.3, 1.5, 0.3);
      l[side + 3] = Vec3(0.5, 0.5, 0.5);
      l[side + 4] = Vec3::Zero();
    }
    for (int side : {kLeftLeg, kRightLeg}) {
      l[side] = Vec3(0.1, 0.1, 0.1);
      l[side + 1] = Vec3(1.0, 0.5, 0.6);
      l[side + 2] = Vec3(1.5, 0.1, 0.1);
      l[side + 3] = Vec3(0.4, 0.2, 0.2);
    }
    return l;
  }();
  return kLimits;
}

BodySpec random_body_spec(std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  BodySpec spec;
  spec.seed = seed;
  const auto& lim = joint_limits();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int b = 0; b < kBoneCount; ++b)
    for (int a = 0; a < 3; ++a) spec.angles[b][a] = amplitude * lim[b][a] * u(rng);
  const double height = std::uniform_real_distribution<double>(0.92, 1.08)(rng);
  spec.proportions.fill(height);
  spec.texture = random_texture(rng, kBodyRegionCount);
  return spec;
}

Skeleton25 pose_skeleton(const BodySpec& spec) {
  const auto& lim = joint_limits();
  for (int b = 0; b < kBoneCount; ++b) {
    if ((spec.angles[b].cwiseAbs() - lim[b]).maxCoeff() > 1e-12) {
      throw std::invalid_argument("gen_body: bone " + std::string(Skeleton25::names()[b + 1]) +
                                  " exceeds its joint limits");
    }
    if (!(spec.proportions[b] > 0)) throw std::invalid_argument("gen_body: bone proportions must be positive");
  }
  const Skeleton25 rest = rest_skeleton();
  const auto& par = Skeleton25::parents();
  std::array<Eigen::Matrix3d, kJointCount> world;
  world[0].setIdentity();
  Skeleton25 out;
  out.joints[0] = rest.joints[0];
  for (int j = 1; j < kJointCount; ++j) {
    const int p = par[j], b = j - 1;
    const Vec3& a = spec.angles[b];
    const Eigen::Matrix3d local = (Eigen::AngleAxisd(a.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(a.y(), Vec3::UnitY()) *
                                   Eigen::AngleAxisd(a.x(), Vec3::UnitX()))
                                      .toRotationMatrix();
    world[j] = world[p] * local;
    out.joints[j] = out.joints[p] + world[j] * ((rest.joints[j] - rest.joints[p]) * spec.proportions[b]);
  }
  return out;
}

BodySample gen_body(const BodySpec& spec) {
  BodySample s;
  s.skeleton = pose_skeleton(spec);
  const auto radii = default_bone_radii();
  std::array<double, kBoneCount> scaled{};
  for (int b = 0; b < kBoneCount; ++b) scaled[b] = radii[b] * spec.proportions[b];
  const auto caps = skeleton_capsules(s.skeleton, scaled);
  s.mesh = capsules_to_mesh(caps, spec.resolution);
  s.mesh.colors.resize(s.mesh.vertices.size());
  const auto& regions = bone_regions();
  for (std::size_t i = 0; i < s.mesh.vertices.size(); ++i) {
    int which = 0;
    capsule_union_sdf(caps, s.mesh.vertices[i], &which);
    s.mesh.colors[i] = spec.texture.color(static_cast<int>(regions[which]), s.mesh.vertices[i]);
  }
  return s;
}

double Primitive::sdf(const Vec3& p) const {
  const Vec3 q = p - center;
  switch (kind) {
    case PrimitiveKind::kSphere:
      return q.norm() - size.x();
    case PrimitiveKind::kBox: {
      const Vec3 d = q.cwiseAbs() - size;
      return d.cwiseMax(0.0).norm() + std::min(d.maxCoeff(), 0.0);
    }
    case PrimitiveKind::kCylinder: {
      const double along = q[axis];
      const double radial = std::sqrt(std::max(0.0, q.squaredNorm() - along * along));
      const double dr = radial - size.x(), da = std::abs(along) - size.y();
      return std::hypot(std::max(dr, 0.0), std::max(da, 0.0)) + std::min(std::max(dr, da), 0.0);
    }
    case PrimitiveKind::kCapsule: {
      Vec3 c = q;
      c[axis] -= std::clamp(q[axis], -size.y(), size.y());
      return c.norm() - size.x();
    }
  }
  return std::numeric_limits<double>::infinity();
}

Aabb Primitive::bounds() const {
  Vec3 h;
  switch (kind) {
    case PrimitiveKind::kSphere:
      h = Vec3::Constant(size.x());
      break;
    case PrimitiveKind::kBox:
      h = size;
      break;
    case PrimitiveKind::kCylinder:
    case PrimitiveKind::kCapsule:
      h = Vec3::Constant(size.x());
      h[axis] = size.y() + (kind == PrimitiveKind::kCapsule ? size.x() : 0.0);
      break;
  }
  return {center - h, center + h};
}

ObjectSpec random_object_spec(std::uint64_t seed, double min_scale, double max_scale) {
  if (!(min_scale > 0) || max_scale < min_scale) throw std::invalid_argument("object spec: invalid scale range");
  std::mt19937_64 rng(seed);
  ObjectSpec spec;
  spec.seed = seed;
  const int parts = std::uniform_int_distribution<int>(1, 4)(rng);
  std::uniform_real_distribution<double> ext(0.15, 0.5), u(-1, 1);
  std::uniform_int_distribution<int> kind(0, 3), axis(0, 2);
  for (int i = 0; i < parts; ++i) {
    Primitive p;
    p.kind = static_cast<PrimitiveKind>(kind(rng));
    p.size = Vec3(ext(rng), ext(rng), ext(rng));
    p.axis = axis(rng);
    if (p.kind == PrimitiveKind::kCylinder || p.kind == PrimitiveKind::kCapsule) p.size.y() *= 1.6;
    if (i > 0) {
      // Attach to the previous part so the union stays connected.
      const Primitive& prev = spec.parts.back();
      Vec3 dir(u(rng), u(rng), u(rng));
      if (dir.norm() < 1e-3) dir = Vec3::UnitX();
      p.center = prev.center + dir.normalized().cwiseProduct(0.5 * prev.bounds().size());
    }
    spec.parts.push_back(p);
  }
  spec.scale = std::exp(std::uniform_real_distribution<double>(std::log(min_scale), std::log(max_scale))(rng));
  spec.texture = random_texture(rng, parts);
  return spec;
}

TriangleMesh gen_object(const ObjectSpec& spec) {
  if (spec.parts.empty()) throw std::invalid_argument("gen_object: empty primitive union");
  if (!(spec.scale > 0)) throw std::invalid_argument("gen_object: scale must be positive");
  if (spec.resolution < 8) throw std::invalid_argument("gen_object: resolution must be >= 8");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const auto& p : spec.parts) {
    if (!(p.size.minCoeff() > 0) || p.axis < 0 || p.axis > 2) throw std::invalid_argument("gen_object: degenerate primitive");
    const Aabb b = p.bounds();
    lo = lo.cwiseMin(b.min);
    hi = hi.cwiseMax(b.max);
  }
  const int res = spec.resolution;
  const double h = (hi - lo).maxCoeff() / (res - 5);
  const Aabb box = Aabb::from_center_size(0.5 * (lo + hi), Vec3::Constant(h * (res - 1)));
  const std::size_t k = static_cast<std::size_t>(res);
  std::vector<double> field(k * k * k);
  auto union_sdf = [&](const Vec3& p, int* which) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.parts.size(); ++i) {
      const double d = spec.parts[i].sdf(p);
      if (d < best) {
        best = d;
        if (which) *which = static_cast<int>(i);
      }
    }
    return best;
  };
  for (std::size_t z = 0; z < k; ++z)
    for (std::size_t y = 0; y < k; ++y)
      for (std::size_t x = 0; x < k; ++x)
        field[(z * k + y) * k + x] = -union_sdf(box.min + h * Vec3(double(x), double(y), double(z)), nullptr);
  TriangleMesh mesh = marching_cubes(field, res, 0.0, box);
  if (mesh.empty()) throw std::invalid_argument("gen_object: primitive union produced no surface");

  mesh.colors.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    int which = 0;
    union_sdf(mesh.vertices[i], &which);
    mesh.colors[i] = spec.texture.color(which, mesh.vertices[i]);
  }
  const Aabb tight = tight_aabb(mesh);
  const double s = spec.scale / tight.size().maxCoeff();
  const Vec3 c = tight.center();
  for (auto& v : mesh.vertices) v = s * (v - c);
  return mesh;
}

PartialMode partial_mode_from_string(const std::string& s) {
  if (s == "halfspace") return PartialMode::kHalfspace;
  if (s == "patches") return PartialMode::kPatches;
  if (s == "both") return PartialMode::kBoth;
  throw std::invalid_argument("unknown partial mode '" + s + "' (expected halfspace, patches or both)");
}

std::string to_string(PartialMode mode) {
  switch (mode) {
    case PartialMode::kHalfspace:
      return "halfspace";
    case PartialMode::kPatches:
      return "patches";
    case PartialMode::kBoth:
      return "both";
  }
  return "?";
}

namespace {

TriangleMesh keep_faces(const TriangleMesh& mesh, const std::vector<char>& removed) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  out.colors = mesh.colors;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    if (!removed[f]) out.faces.push_back(mesh.faces[f]);
  return compact(out);
}

// Removes not-yet-removed faces in ascending `key` order until the removed
// area reaches `target`. Returns the key of the last face taken.
double remove_until(const std::vector<double>& key, const std::vector<double>& area, std::vector<char>& removed,
                    double target) {
  double have = 0;
  std::vector<std::size_t> order;
  for (std::size_t f = 0; f < key.size(); ++f) {
    if (removed[f]) have += area[f];
    else order.push_back(f);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t f : order) {
    if (have >= target) break;
    removed[f] = 1;
    have += area[f];
    last = key[f];
  }
  return last;
}

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  for (;;) {
    const Vec3 d(n(rng), n(rng), n(rng));
    if (d.norm() > 1e-6) return d.normalized();
  }
}

}  // namespace

TriangleMesh cut_halfspace(const TriangleMesh& mesh, const Vec3& normal, double offset) {
  std::vector<char> removed(mesh.faces.size(), 0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) removed[f] = normal.dot(face_centroid(mesh, f)) > offset;
  return keep_faces(mesh, removed);
}

TriangleMesh make_partial(const TriangleMesh& gt, std::uint64_t seed, PartialMode mode, const PartialConfig& cfg) {
  if (gt.empty()) throw std::invalid_argument("make_partial: empty mesh");
  if (!(cfg.min_removed >= 0) || !(cfg.max_removed <= 1) || cfg.min_removed > cfg.max_removed) {
    throw std::invalid_argument("make_partial: invalid removal window");
  }
  const std::size_t nf = gt.faces.size();
  std::vector<double> area(nf);
  std::vector<Vec3> cent(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& t = gt.faces[f];
    area[f] = triangle_area(gt.vertices[t[0]], gt.vertices[t[1]], gt.vertices[t[2]]);
    cent[f] = face_centroid(gt, f);
  }
  const double total = std::accumulate(area.begin(), area.end(), 0.0);
  std::mt19937_64 rng(seed);
  const double span = cfg.max_removed - cfg.min_removed;
  std::uniform_real_distribution<double> target_dist(cfg.min_removed + 0.05 * span, cfg.max_removed - 0.05 * span);

  auto halfspace = [&](std::vector<char>& removed, double target) {
    const Vec3 n = random_direction(rng);
    std::vector<double> key(nf);
    for (std::size_t f = 0; f < nf; ++f) key[f] = -n.dot(cent[f]);
    remove_until(key, area, removed, target);
  };
  auto patches = [&](std::vector<char>& removed, double target) {
    const int anchors = std::uniform_int_distribution<int>(2, 5)(rng);
    std::discrete_distribution<std::size_t> pick(area.begin(), area.end());
    std::vector<Vec3> a;
    for (int i = 0; i < anchors; ++i) a.push_back(cent[pick(rng)]);
    std::vector<double> key(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& p : a) d = std::min(d, (cent[f] - p).norm());
      key[f] = d;
    }
    remove_until(key, area, removed, target);
  };

  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const double frac = target_dist(rng);
    std::vector<char> removed(nf, 0);
    switch (mode) {
      case PartialMode::kHalfspace: {
        const int planes = std::uniform_int_distribution<int>(1, 2)(rng);
        if (planes == 2) halfspace(removed, frac * total * std::uniform_real_distribution<double>(0.4, 0.6)(rng));
        halfspace(removed, frac * total);
        break;
      }
      case PartialMode::kPatches:
        patches(removed, frac * total);
        break;
      case PartialMode::kBoth:
        halfspace(removed, 0.5 * frac * total);
        patches(removed, frac * total);
        break;
    }
    double gone = 0;
    for (std::size_t f = 0; f < nf; ++f)
      if (removed[f]) gone += area[f];
    const double got = gone / total;
    if (got < cfg.min_removed || got > cfg.max_removed || gone >= total) continue;
    return keep_faces(gt, removed);
  }
  throw std::runtime_error("make_partial: no cut within the removal window after " + std::to_string(cfg.max_retries) +
                           " attempts");
}

std::vector<const ManifestEntry*> DatasetManifest::split(const std::string& name) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.split == name) out.push_back(&e);
  return out;
}

std::string split_for_id(const std::string& id, const std::array<double, 3>& fractions) {
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (!(sum > 0) || *std::min_element(fractions.begin(), fractions.end()) < 0) {
    throw std::invalid_argument("split fractions must be non-negative with a positive sum");
  }
  const double u = static_cast<double>(mix_seed(fnv1a64(id), 0) >> 11) * 0x1.0p-53;
  if (u < fractions[0] / sum) return "train";
  if (u < (fractions[0] + fractions[1]) / sum) return "val";
  return "test";
}

namespace {

json box_json(const Aabb& b) { return json::array({b.min.x(), b.min.y(), b.min.z(), b.max.x(), b.max.y(), b.max.z()}); }

Aabb box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 6) throw std::runtime_error("manifest: box must be 6 numbers");
  return {Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>()),
          Vec3(j[3].get<double>(), j[4].get<double>(), j[5].get<double>())};
}

}  // namespace

void write_manifest(const DatasetManifest& m, const fs::path& path) {
  std::ostringstream out;
  json header{{"format", "texrecon-manifest"}, {"version", 1}, {"config_hash", m.config_hash},
              {"count", m.entries.size()}};
  out << header.dump() << '\n';
  for (const auto& e : m.entries) {
    json j{{"id", e.id}, {"kind", e.kind}, {"gt", e.gt_path.generic_string()}, {"partial", e.partial_path.generic_string()}};
    if (e.skeleton_path) j["skeleton"] = e.skeleton_path->generic_string();
    j["tight_box"] = box_json(e.tight_box);
    j["gt_box"] = box_json(e.gt_box);
    j["split"] = e.split;
    j["seed"] = e.seed;
    out << j.dump() << '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest " + path.string());
  f << out.str();
  if (!f) throw std::runtime_error("failed writing manifest " + path.string());
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read manifest " + path.string());
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!header) {
        if (j.value("format", "") != "texrecon-manifest") throw std::runtime_error("not a texrecon manifest");
        m.config_hash = j.value("config_hash", "");
        header = true;
        continue;
      }
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.kind = j.at("kind").get<std::string>();
      e.gt_path = j.at("gt").get<std::string>();
      e.partial_path = j.at("partial").get<std::string>();
      if (j.contains("skeleton")) e.skeleton_path = fs::path(j.at("skeleton").get<std::string>());
      e.tight_box = box_from_json(j.at("tight_box"));
      e.gt_box = box_from_json(j.at("gt_box"));
      e.split = j.at("split").get<std::string>();
      e.seed = j.at("seed").get<std::uint64_t>();
      if (e.kind != "body" && e.kind != "object") throw std::runtime_error("unknown kind '" + e.kind + "'");
      m.entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (!header) throw std::runtime_error(path.string() + ": empty manifest");
  return m;
}

void save_skeleton(const Skeleton25& s, const fs::path& path) {
  json j{{"format", "texrecon-skeleton25"}, {"names", json::array()}, {"joints", json::array()}};
  for (int i = 0; i < kJointCount; ++i) {
    j["names"].push_back(std::string(Skeleton25::names()[i]));
    j["joints"].push_back({s.joints[i].x(), s.joints[i].y(), s.joints[i].z()});
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write skeleton " + path.string());
  f << j.dump() << '\n';
}

Skeleton25 load_skeleton(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read skeleton " + path.string());
  const json j = json::parse(f);
  const auto& joints = j.at("joints");
  if (joints.size() != kJointCount) throw std::runtime_error(path.string() + ": expected 25 joints");
  Skeleton25 s;
  for (int i = 0; i < kJointCount; ++i)
    s.joints[i] = Vec3(joints[i][0].get<double>(), joints[i][1].get<double>(), joints[i][2].get<double>());
  return s;
}

DatasetManifest build_dataset(const DatasetConfig& cfg) {
  if (cfg.bodies < 0 || cfg.objects < 0) throw std::invalid_argument("build_dataset: negative entry counts");
  const fs::path mesh_dir = cfg.output_dir / "meshes";
  fs::create_directories(mesh_dir);
  DatasetManifest m;
  m.root = cfg.output_dir;
  m.config_hash = cfg.config_hash;
  auto id_for = [](const char* kind, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d", kind, i);
    return std::string(buf);
  };
  auto finish = [&](ManifestEntry e, const TriangleMesh& gt, const TriangleMesh& partial) {
    const fs::path gt_rel = fs::path("meshes") / (e.id + "_gt.obj");
    const fs::path partial_rel = fs::path("meshes") / (e.id + "_partial.obj");
    try {
      save_mesh(gt, cfg.output_dir / gt_rel);
      save_mesh(partial, cfg.output_dir / partial_rel);
    } catch (const std::exception& ex) {
      throw std::runtime_error("build_dataset: " + e.id + ": " + ex.what());
    }
    e.gt_path = gt_rel;
    e.partial_path = partial_rel;
    e.gt_box = tight_aabb(gt);
    e.tight_box = tight_aabb(partial);
    e.split = split_for_id(e.id, cfg.splits);
    m.entries.push_back(std::move(e));
  };
  for (int i = 0; i < cfg.bodies; ++i) {
    ManifestEntry e;
    e.id = id_for("body", i);
    e.kind = "body";
    e.seed = mix_seed(cfg.seed, fnv1a64(e.id));
    BodySpec spec = random_body_spec(e.seed, cfg.pose_amplitude);
    spec.resolution = cfg.body_resolution;
    const BodySample body = gen_body(spec);
    const TriangleMesh partial = make_partial(body.mesh, mix_seed(e.seed, 1), cfg.partial_mode, cfg.partial);
    const fs::path skel_rel = fs::path("meshes") / (e.id + "_skeleton.json");
    save_skeleton(body.skeleton, cfg.output_dir / skel_rel);
    e.skeleton_path = skel_rel;
    finish(std::move(e), body.mesh, partial);
  }
  for (int i = 0; i < cfg.objects; ++i) {
    ManifestEntry e;
    e.id = id_for("object", i);
    e.kind = "object";
    e.seed = mix_seed(cfg.seed, fnv1a64(e.id));
    ObjectSpec spec = random_object_spec(e.seed, cfg.min_scale, cfg.max_scale);
    spec.resolution = cfg.object_resolution;
    const TriangleMesh gt = gen_object(spec);
    const TriangleMesh partial = make_partial(gt, mix_seed(e.seed, 1), cfg.partial_mode, cfg.partial);
    finish(std::move(e), gt, partial);
  }
  write_manifest(m, cfg.output_dir / "manifest.jsonl");
  return m;
}

}  // namespace texrecon
