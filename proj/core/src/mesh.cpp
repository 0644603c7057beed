// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace texrecon {

double Aabb::volume() const {
  const Vec3 s = size();
  return std::max(0.0, s.x()) * std::max(0.0, s.y()) * std::max(0.0, s.z());
}

bool Aabb::degenerate() const { return !(size().array() > 0.0).all(); }

bool Aabb::contains(const Vec3& p) const { return (p.array() >= min.array()).all() && (p.array() <= max.array()).all(); }

Aabb Aabb::padded(double min_extent) const {
  Aabb out = *this;
  for (int a = 0; a < 3; ++a) {
    const double ext = max[a] - min[a];
    if (ext < min_extent) {
      const double grow = 0.5 * (min_extent - ext);
      out.min[a] -= grow;
      out.max[a] += grow;
    }
  }
  return out;
}

Aabb Aabb::from_center_size(const Vec3& center, const Vec3& size) { return {center - 0.5 * size, center + 0.5 * size}; }

double box_iou(const Aabb& a, const Aabb& b) {
  Aabb inter{a.min.cwiseMax(b.min), a.max.cwiseMin(b.max)};
  const double vi = inter.volume();
  const double vu = a.volume() + b.volume() - vi;
  return vu > 0 ? vi / vu : 0.0;
}

void TriangleMesh::validate() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) throw std::invalid_argument("mesh: vertex " + std::to_string(i) + " is not finite");
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (auto idx : faces[f]) {
      if (idx >= vertices.size()) {
        throw std::invalid_argument("mesh: face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                                    " of " + std::to_string(vertices.size()));
      }
    }
  }
  if (!colors.empty() && colors.size() != vertices.size()) {
    throw std::invalid_argument("mesh: " + std::to_string(colors.size()) + " colors for " +
                                std::to_string(vertices.size()) + " vertices");
  }
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * (b - a).cross(c - a).norm(); }

double surface_area(const TriangleMesh& mesh) {
  double s = 0;
  for (const auto& f : mesh.faces) s += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  return s;
}

double signed_volume(const TriangleMesh& mesh) {
  double v = 0;
  for (const auto& f : mesh.faces) {
    v += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
  }
  return v / 6.0;
}

Vec3 face_centroid(const TriangleMesh& mesh, std::size_t f) {
  const auto& t = mesh.faces[f];
  return (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
}

Aabb tight_aabb(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw std::invalid_argument("tight_aabb: mesh has no vertices");
  Aabb box{mesh.vertices.front(), mesh.vertices.front()};
  for (const auto& v : mesh.vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

}  // namespace

bool is_watertight(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return false;
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      const auto a = f[i], b = f[(i + 1) % 3];
      if (a == b) return false;
      ++count[edge_key(std::min(a, b), std::max(a, b))];
    }
  }
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

bool is_consistently_oriented(const TriangleMesh& mesh) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      if (++directed[edge_key(f[i], f[(i + 1) % 3])] > 1) return false;
    }
  }
  for (const auto& [k, n] : directed) {
    const auto a = static_cast<std::uint32_t>(k >> 32), b = static_cast<std::uint32_t>(k & 0xffffffffu);
    if (!directed.count(edge_key(b, a))) return false;
  }
  return true;
}

long euler_characteristic(const TriangleMesh& mesh) {
  std::vector<char> used(mesh.vertices.size(), 0);
  std::unordered_map<std::uint64_t, int> edges;
  for (const auto& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      used[f[i]] = 1;
      const auto a = f[i], b = f[(i + 1) % 3];
      edges[edge_key(std::min(a, b), std::max(a, b))] = 1;
    }
  }
  const long v = std::count(used.begin(), used.end(), 1);
  return v - static_cast<long>(edges.size()) + static_cast<long>(mesh.faces.size());
}

TriangleMesh weld_vertices(const TriangleMesh& mesh, double tolerance) {
  struct KeyHash {
    std::size_t operator()(const std::array<long long, 3>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_map<std::array<long long, 3>, std::vector<std::uint32_t>, KeyHash> buckets;
  TriangleMesh out;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  const double inv = 1.0 / tolerance;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    const std::array<long long, 3> key{std::llround(p.x() * inv), std::llround(p.y() * inv), std::llround(p.z() * inv)};
    std::int64_t found = -1;
    for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
      for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
        for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
          auto it = buckets.find({key[0] + dx, key[1] + dy, key[2] + dz});
          if (it == buckets.end()) continue;
          for (auto j : it->second) {
            if ((out.vertices[j] - p).norm() <= tolerance) {
              found = j;
              break;
            }
          }
        }
      }
    }
    if (found < 0) {
      found = static_cast<std::int64_t>(out.vertices.size());
      out.vertices.push_back(p);
      if (mesh.has_colors()) out.colors.push_back(mesh.colors[i]);
      buckets[key].push_back(static_cast<std::uint32_t>(found));
    }
    remap[i] = static_cast<std::uint32_t>(found);
  }
  out.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) out.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  return out;
}

TriangleMesh compact(const TriangleMesh& mesh) {
  constexpr auto kUnused = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> remap(mesh.vertices.size(), kUnused);
  TriangleMesh out;
  out.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    Face nf{};
    for (int i = 0; i < 3; ++i) {
      if (remap[f[i]] == kUnused) {
        remap[f[i]] = static_cast<std::uint32_t>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[f[i]]);
        if (mesh.has_colors()) out.colors.push_back(mesh.colors[f[i]]);
      }
      nf[i] = remap[f[i]];
    }
    out.faces.push_back(nf);
  }
  return out;
}

TriangleMesh merge_meshes(const std::vector<const TriangleMesh*>& parts) {
  TriangleMesh out;
  const bool colored = !parts.empty() && std::all_of(parts.begin(), parts.end(), [](auto* m) { return m->has_colors(); });
  for (const auto* m : parts) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m->vertices.begin(), m->vertices.end());
    if (colored) out.colors.insert(out.colors.end(), m->colors.begin(), m->colors.end());
    for (const auto& f : m->faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  }
  return out;
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t j = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > j) toks.push_back(line.substr(j, i - j));
  }
  return toks;
}

[[noreturn]] void io_fail(const std::string& where, std::size_t line, const std::string& what) {
  throw MeshIoError(where + ":" + std::to_string(line) + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MeshIoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TriangleMesh parse_obj(const std::string& text, const std::string& where) {
  TriangleMesh mesh;
  std::vector<std::pair<std::size_t, std::vector<long long>>> raw_faces;
  bool any_color = false, any_plain = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = split_ws(line);
    if (toks.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (toks[0] == "v") {
      if (toks.size() != 4 && toks.size() != 7) io_fail(where, lineno, "vertex needs 3 or 6 numbers");
      double vals[6];
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (!parse_double(toks[i], vals[i - 1]) || !std::isfinite(vals[i - 1])) {
          io_fail(where, lineno, "bad number '" + std::string(toks[i]) + "'");
        }
      }
      mesh.vertices.emplace_back(vals[0], vals[1], vals[2]);
      if (toks.size() == 7) {
        mesh.colors.emplace_back(vals[3], vals[4], vals[5]);
        any_color = true;
      } else {
        mesh.colors.emplace_back(0.0, 0.0, 0.0);
        any_plain = true;
      }
    } else if (toks[0] == "f") {
      if (toks.size() < 4) io_fail(where, lineno, "face needs at least 3 vertices");
      std::vector<long long> idx;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto t = toks[i].substr(0, toks[i].find('/'));
        long long v = 0;
        auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v == 0) {
          io_fail(where, lineno, "bad face index '" + std::string(toks[i]) + "'");
        }
        idx.push_back(v);
      }
      raw_faces.emplace_back(lineno, std::move(idx));
    } else if (toks[0] == "vn" || toks[0] == "vt" || toks[0] == "o" || toks[0] == "g" || toks[0] == "s" ||
               toks[0] == "usemtl" || toks[0] == "mtllib") {
      continue;
    } else {
      io_fail(where, lineno, "unsupported statement '" + std::string(toks[0]) + "'");
    }
    if (end == text.size()) break;
  }
  const auto n = static_cast<long long>(mesh.vertices.size());
  for (const auto& [line, idx] : raw_faces) {
    std::vector<std::uint32_t> resolved;
    for (long long v : idx) {
      const long long r = v > 0 ? v - 1 : n + v;
      if (r < 0 || r >= n) {
        io_fail(where, line, "face references vertex " + std::to_string(v) + " but only " + std::to_string(n) + " exist");
      }
      resolved.push_back(static_cast<std::uint32_t>(r));
    }
    for (std::size_t i = 1; i + 1 < resolved.size(); ++i) mesh.faces.push_back({resolved[0], resolved[i], resolved[i + 1]});
  }
  if (!any_color || any_plain) mesh.colors.clear();
  return mesh;
}

TriangleMesh parse_ply(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next() || line != "ply") io_fail(where, 1, "missing 'ply' magic");
  struct Prop {
    std::string name, type;
  };
  std::size_t nverts = 0, nfaces = 0;
  std::vector<Prop> vprops;
  std::string current;
  while (true) {
    if (!next()) io_fail(where, lineno, "unterminated header");
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") io_fail(where, lineno, "only ASCII PLY is supported");
    } else if (toks[0] == "element") {
      if (toks.size() != 3) io_fail(where, lineno, "malformed element line");
      current = std::string(toks[1]);
      const std::size_t count = std::stoul(std::string(toks[2]));
      if (current == "vertex") nverts = count;
      else if (current == "face") nfaces = count;
      else if (count) io_fail(where, lineno, "unsupported element '" + current + "'");
    } else if (toks[0] == "property") {
      if (current == "vertex") {
        if (toks.size() != 3) io_fail(where, lineno, "malformed vertex property");
        vprops.push_back({std::string(toks[2]), std::string(toks[1])});
      }
    } else if (toks[0] == "end_header") {
      break;
    } else {
      io_fail(where, lineno, "unexpected header line");
    }
  }
  int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
  bool color_bytes = false;
  for (std::size_t i = 0; i < vprops.size(); ++i) {
    const auto& p = vprops[i];
    const int ii = static_cast<int>(i);
    if (p.name == "x") ix = ii;
    if (p.name == "y") iy = ii;
    if (p.name == "z") iz = ii;
    if (p.name == "red" || p.name == "r") ir = ii;
    if (p.name == "green" || p.name == "g") ig = ii;
    if (p.name == "blue" || p.name == "b") ib = ii;
    if ((p.name == "red" || p.name == "r") && (p.type == "uchar" || p.type == "uint8")) color_bytes = true;
  }
  if (ix < 0 || iy < 0 || iz < 0) io_fail(where, lineno, "vertex element lacks x/y/z");
  const bool colored = ir >= 0 && ig >= 0 && ib >= 0;
  TriangleMesh mesh;
  for (std::size_t v = 0; v < nverts; ++v) {
    if (!next()) io_fail(where, lineno, "missing vertex lines");
    const auto toks = split_ws(line);
    if (toks.size() != vprops.size()) io_fail(where, lineno, "vertex has wrong number of values");
    std::vector<double> vals(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!parse_double(toks[i], vals[i])) io_fail(where, lineno, "bad number '" + std::string(toks[i]) + "'");
    }
    mesh.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
    if (colored) {
      Vec3 c(vals[ir], vals[ig], vals[ib]);
      mesh.colors.push_back(color_bytes ? Vec3(c / 255.0) : c);
    }
  }
  for (std::size_t f = 0; f < nfaces; ++f) {
    if (!next()) io_fail(where, lineno, "missing face lines");
    const auto toks = split_ws(line);
    if (toks.empty()) io_fail(where, lineno, "empty face line");
    const std::size_t k = std::stoul(std::string(toks[0]));
    if (k < 3 || toks.size() != k + 1) io_fail(where, lineno, "malformed face");
    std::vector<std::uint32_t> idx;
    for (std::size_t i = 1; i <= k; ++i) {
      long long v = -1;
      auto res = std::from_chars(toks[i].data(), toks[i].data() + toks[i].size(), v);
      if (res.ec != std::errc() || v < 0 || static_cast<std::size_t>(v) >= nverts) {
        io_fail(where, lineno, "face references vertex " + std::string(toks[i]) + " but only " + std::to_string(nverts) +
                                   " exist");
      }
      idx.push_back(static_cast<std::uint32_t>(v));
    }
    for (std::size_t i = 1; i + 1 < idx.size(); ++i) mesh.faces.push_back({idx[0], idx[i], idx[i + 1]});
  }
  return mesh;
}

std::string mesh_to_ply(const TriangleMesh& mesh) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(mesh.vertices.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z\n";
  if (mesh.has_colors()) out += "property double red\nproperty double green\nproperty double blue\n";
  out += "element face " + std::to_string(mesh.faces.size()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (a) out += ' ';
      append_double(out, mesh.vertices[i][a]);
    }
    if (mesh.has_colors()) {
      for (int a = 0; a < 3; ++a) {
        out += ' ';
        append_double(out, mesh.colors[i][a]);
      }
    }
    out += '\n';
  }
  for (const auto& f : mesh.faces) {
    out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
  }
  return out;
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

std::string mesh_to_obj(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 24);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    out += "v";
    for (int a = 0; a < 3; ++a) {
      out += ' ';
      append_double(out, mesh.vertices[i][a]);
    }
    if (mesh.has_colors()) {
      for (int a = 0; a < 3; ++a) {
        out += ' ';
        append_double(out, mesh.colors[i][a]);
      }
    }
    out += '\n';
  }
  for (const auto& f : mesh.faces) {
    out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
  }
  return out;
}

TriangleMesh mesh_from_obj(const std::string& text) { return parse_obj(text, "<obj>"); }

TriangleMesh load_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext != ".obj" && ext != ".ply") throw MeshIoError("unsupported mesh extension '" + ext + "' for " + path.string());
  const std::string text = read_file(path);
  TriangleMesh mesh = ext == ".obj" ? parse_obj(text, path.string()) : parse_ply(text, path.string());
  return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  mesh.validate();
  const std::string ext = lower_ext(path);
  if (ext != ".obj" && ext != ".ply") throw MeshIoError("unsupported mesh extension '" + ext + "' for " + path.string());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw MeshIoError("cannot open " + path.string() + " for writing");
  const std::string text = ext == ".obj" ? mesh_to_obj(mesh) : mesh_to_ply(mesh);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw MeshIoError("write failed for " + path.string());
}

}  // namespace texrecon
