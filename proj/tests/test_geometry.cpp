// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "texrecon/inside.hpp"
#include "texrecon/kdtree.hpp"
#include "texrecon/marching_cubes.hpp"
#include "texrecon/metrics.hpp"
#include "texrecon/sampling.hpp"
#include "texrecon/voxel.hpp"

using namespace texrecon;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "texrecon_test_geometry";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<double> sphere_field(int k, double r, const Aabb& box) {
  std::vector<double> f(std::size_t(k) * k * k);
  const Vec3 c = box.center();
  for (int z = 0; z < k; ++z)
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) {
        const Vec3 p = box.min + Vec3(x, y, z).cwiseProduct(box.size()) / (k - 1);
        f[(std::size_t(z) * k + y) * k + x] = 0.5 + (r - (p - c).norm());
      }
  return f;
}

}  // namespace

TEST_CASE("mesh io round trip") {
  TriangleMesh cube = fixture::unit_cube();
  CHECK(is_watertight(cube));
  CHECK(signed_volume(cube) == doctest::Approx(1.0));
  for (const char* ext : {".obj", ".ply"}) {
    const auto path = scratch(std::string("cube") + ext);
    save_mesh(cube, path);
    const auto back = load_mesh(path);
    CHECK(back.vertices.size() == 8);
    CHECK(back.faces.size() == 12);
    CHECK(back.vertices == cube.vertices);
    CHECK(back.faces == cube.faces);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  cube.colors.resize(8);
  for (auto& c : cube.colors) c = Vec3(u(rng), u(rng), u(rng));
  cube.vertices[3] = Vec3(0.1 + 1e-13, 1.0 / 3.0, std::nextafter(1.0, 2.0));
  for (const char* ext : {".obj", ".ply"}) {
    const auto path = scratch(std::string("colored") + ext);
    save_mesh(cube, path);
    const auto back = load_mesh(path);
    CHECK(back.vertices == cube.vertices);
    CHECK(back.colors == cube.colors);
  }
}

TEST_CASE("mesh io errors") {
  const auto path = scratch("bad.obj");
  {
    std::ofstream f(path);
    for (int i = 0; i < 8; ++i) f << "v 0 0 " << i << "\n";
    f << "f 1 2 3\nf 1 2 9\n";
  }
  try {
    load_mesh(path);
    FAIL("expected an error");
  } catch (const MeshIoError& e) {
    CHECK(std::string(e.what()).find(":10:") != std::string::npos);
  }
  CHECK_THROWS_AS(load_mesh(scratch("x.stl")), MeshIoError);
  {
    std::ofstream f(scratch("junk.obj"));
    f << "v 1 2\n";
  }
  CHECK_THROWS_AS(load_mesh(scratch("junk.obj")), MeshIoError);
}

TEST_CASE("sample_surface") {
  TriangleMesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(1, 0.2, 0.1), Vec3(0.3, 1, 0.5)};
  tri.faces = {{0, 1, 2}};
  const auto s = sample_surface(tri, 500, 4);
  const Vec3 n = (tri.vertices[1] - tri.vertices[0]).cross(tri.vertices[2] - tri.vertices[0]).normalized();
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(std::abs(n.dot(s.points[i] - tri.vertices[0])) < 1e-9);
    CHECK(std::abs(s.normals[i].norm() - 1.0) < 1e-6);
  }

  TriangleMesh two;
  two.vertices = {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 3, 0), Vec3(10, 0, 0), Vec3(11, 0, 0), Vec3(10, 1, 0)};
  two.faces = {{0, 1, 2}, {3, 4, 5}};
  const auto big = sample_surface(two, 100000, 8);
  const double frac = double(std::count(big.faces.begin(), big.faces.end(), 0u)) / 100000.0;
  CHECK(frac >= 0.89);
  CHECK(frac <= 0.91);

  const auto again = sample_surface(two, 100000, 8);
  CHECK(again.points == big.points);

  TriangleMesh flat;
  flat.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_surface(flat, 10, 1), std::invalid_argument);
}

TEST_CASE("tight box and normalization") {
  const auto cube = fixture::unit_cube();
  auto box = tight_aabb(cube);
  CHECK(box.min == Vec3::Zero());
  CHECK(box.max == Vec3::Ones());
  box = tight_aabb(fixture::unit_cube(Vec3(5, 0, 0)));
  CHECK(box.min == Vec3(5, 0, 0));

  TriangleMesh dot;
  dot.vertices = {Vec3(1, 2, 3)};
  CHECK(tight_aabb(dot).degenerate());
  CHECK_THROWS(tight_aabb(TriangleMesh{}));
  CHECK_THROWS_AS(fit_box(tight_aabb(dot), normalized_target_box()), std::invalid_argument);
  const auto [moved, tdot] = normalize_to_box(dot, normalized_target_box());
  CHECK((moved.vertices[0] - Vec3::Constant(0.5)).norm() < 1e-9);

  const Aabb unit{Vec3::Zero(), Vec3::Ones()};
  const auto [n2, t2] = normalize_to_box(fixture::unit_cube(Vec3::Zero(), 2.0), unit);
  CHECK(t2.scale == doctest::Approx(0.5).epsilon(1e-5));
  const auto b2 = tight_aabb(n2);
  CHECK((b2.min - Vec3::Zero()).norm() < 1e-6);
  CHECK((b2.max - Vec3::Ones()).norm() < 1e-6);

  TriangleMesh longbox = fixture::unit_cube();
  for (auto& v : longbox.vertices) v.x() *= 2.0;
  const auto [n3, t3] = normalize_to_box(longbox, unit);
  const auto b3 = tight_aabb(n3);
  CHECK(b3.min.x() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(b3.max.x() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(b3.center().y() == doctest::Approx(0.5));
  CHECK(b3.size().y() == doctest::Approx(0.5).epsilon(1e-5));

  const auto back = t3.invert(n3);
  double err = 0;
  for (std::size_t i = 0; i < back.vertices.size(); ++i) err = std::max(err, (back.vertices[i] - longbox.vertices[i]).norm());
  CHECK(err < 1e-12);
}

TEST_CASE("voxelize") {
  const Aabb unit{Vec3::Zero(), Vec3::Ones()};
  SurfaceSampleSet one;
  one.points = {Vec3(2.5, 5.5, 7.5) / 8.0};
  one.normals = {Vec3::UnitZ()};
  const auto g = voxelize(one, 8, unit);
  CHECK(g.occupied() == 1);
  CHECK(g.cells[g.index(2, 5, 7)] == 1);

  const auto sphere = fixture::sphere(Vec3::Constant(0.5), 0.3);
  const auto s = sample_surface(sphere, 100000, 3);
  const auto g128 = voxelize(s, 128, unit);
  CHECK(g128.cells.size() == std::size_t(128) * 128 * 128);
  CHECK(g128.occupied() > 1000);

  const double cell = 1.0 / 64;
  const auto g64 = voxelize(s, 64, unit);
  double worst = 0;
  for (int z = 0; z < 64; ++z)
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        if (g64.cells[g64.index(x, y, z)]) worst = std::max(worst, std::abs((g64.cell_center(x, y, z) - Vec3::Constant(0.5)).norm() - 0.3));
  // Marching-cubes faceting of the fixture sphere adds at most a small sagitta.
  CHECK(worst <= std::sqrt(3.0) / 2 * cell + 2e-3);

  TriangleMesh colored = sphere;
  colored.colors.assign(colored.vertices.size(), Vec3(0.2, 0.4, 0.6));
  auto cs = sample_surface(colored, 5000, 1);
  auto perm = cs;
  std::mt19937_64 rng(5);
  std::vector<std::size_t> order(cs.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    perm.points[i] = cs.points[order[i]];
    perm.colors[i] = cs.colors[order[i]];
    perm.normals[i] = cs.normals[order[i]];
  }
  const auto ga = voxelize(cs, 32, unit), gb = voxelize(perm, 32, unit);
  CHECK(ga.cells == gb.cells);
  double cerr = 0;
  for (std::size_t i = 0; i < ga.colors.size(); ++i) cerr = std::max(cerr, std::abs(ga.colors[i] - gb.colors[i]));
  CHECK(cerr < 1e-12);

  const auto path = scratch("grid.bin");
  save_grid(path, ga);
  const auto back = load_grid(path);
  CHECK(back.cells == ga.cells);
  CHECK(back.colors == ga.colors);
  CHECK(back.box.min == ga.box.min);
}

TEST_CASE("occupancy oracle") {
  const auto sphere = fixture::sphere(Vec3::Zero(), 1.0);
  const std::vector<Vec3> pts{Vec3::Zero(), Vec3(2, 0, 0), Vec3(0, 0.5, 0.2)};
  for (int axis = 0; axis < 3; ++axis) {
    const auto lab = occupancy_oracle(sphere, pts, axis);
    CHECK(lab == std::vector<std::uint8_t>{1, 0, 1});
  }
  TriangleMesh open = sphere;
  open.faces.pop_back();
  CHECK_THROWS_AS(InsideTester{open}, std::invalid_argument);

  // Lattice-aligned queries hit edges and vertices of the cube exactly.
  const auto cube = fixture::unit_cube();
  std::vector<Vec3> grid;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) grid.push_back(Vec3(-0.5 + i * 0.25, 0.5, -0.5 + j * 0.25));
  for (int axis = 0; axis < 3; ++axis) {
    const auto lab = occupancy_oracle(cube, grid, axis);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec3& p = grid[i];
      const bool strictly_in = p.minCoeff() > 0 && p.maxCoeff() < 1;
      const bool strictly_out = p.minCoeff() < 0 || p.maxCoeff() > 1;
      if (strictly_in) CHECK(lab[i] == 1);
      if (strictly_out) CHECK(lab[i] == 0);
    }
  }
}

TEST_CASE("occupancy oracle agrees with flood fill") {
  const auto torus = fixture::from_sdf(
      [](const Vec3& p) {
        const Vec3 q = p - Vec3::Constant(0.5);
        const double a = std::hypot(q.x(), q.z()) - 0.28;
        return std::hypot(a, q.y()) - 0.1;
      },
      Aabb{Vec3::Zero(), Vec3::Ones()}, 64);
  REQUIRE(is_watertight(torus));
  const Aabb box{Vec3::Constant(-0.02), Vec3::Constant(1.02)};
  const int res = 64;
  const auto flood = oracle::flood_fill_labels(torus, box, res);
  std::vector<Vec3> centers;
  std::vector<int> expect;
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        const int l = flood[(std::size_t(z) * res + y) * res + x];
        if (l < 0) continue;
        centers.push_back(box.min + (Vec3(x, y, z) + Vec3::Constant(0.5)).cwiseProduct(box.size()) / res);
        expect.push_back(l);
      }
  const auto got = occupancy_oracle(torus, centers);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < got.size(); ++i) agree += got[i] == expect[i];
  CHECK(double(agree) / got.size() >= 0.999);
}

TEST_CASE("marching cubes") {
  const Aabb unit{Vec3::Zero(), Vec3::Ones()};
  CHECK(marching_cubes(std::vector<double>(27, 0.0), 3, 0.5, unit).empty());

  std::vector<double> one(27, 0.0);
  one[13] = 1.0;
  const auto blob = marching_cubes(one, 3, 0.5, unit);
  CHECK(is_watertight(blob));
  CHECK(is_consistently_oriented(blob));
  CHECK(euler_characteristic(blob) == 2);
  CHECK(signed_volume(blob) > 0);

  const int k = 64;
  const auto sphere = marching_cubes(sphere_field(k, 0.3, unit), k, 0.5, unit);
  CHECK(is_watertight(sphere));
  CHECK(is_consistently_oriented(sphere));
  CHECK(euler_characteristic(sphere) == 2);
  CHECK(signed_volume(sphere) == doctest::Approx(4.0 / 3 * M_PI * 0.027).epsilon(0.02));
  const double cell = 1.0 / (k - 1);
  double worst = 0;
  for (const auto& v : sphere.vertices) worst = std::max(worst, std::abs((v - Vec3::Constant(0.5)).norm() - 0.3));
  CHECK(worst <= 1.5 * cell);
}

TEST_CASE("marching cubes on random fields stays closed") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  const int k = 8;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(k * k * k, 0.0);
    for (int z = 1; z < k - 1; ++z)
      for (int y = 1; y < k - 1; ++y)
        for (int x = 1; x < k - 1; ++x) f[(z * k + y) * k + x] = u(rng);
    const auto m = marching_cubes(f, k, 0.5, Aabb{Vec3::Zero(), Vec3::Ones()});
    CHECK(is_watertight(m));
    CHECK(is_consistently_oriented(m));
  }
}

TEST_CASE("kdtree matches linear scan") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> pts(2000);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  const KdTree tree(pts);
  for (int i = 0; i < 300; ++i) {
    const Vec3 q(u(rng), u(rng), u(rng));
    double best = INFINITY;
    std::size_t bi = 0;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if ((pts[j] - q).norm() < best) best = (pts[j] - q).norm(), bi = j;
    const auto hit = tree.nearest(q);
    CHECK(hit.index == bi);
    CHECK(hit.distance == doctest::Approx(best));
  }
}

TEST_CASE("metrics") {
  const auto a = fixture::sphere(Vec3::Constant(0.5), 0.3);
  const auto same = eval_metrics(a, a, 4000, 1);
  CHECK(same.chamfer == 0.0);
  CHECK(*same.volumetric_iou == 1.0);

  TriangleMesh far = a;
  for (auto& v : far.vertices) v.x() += 2.0;
  CHECK(*eval_metrics(a, far, 2000, 1).volumetric_iou == 0.0);

  TriangleMesh open = a;
  open.faces.pop_back();
  CHECK_THROWS_AS(eval_metrics(a, open, 100, 1), std::invalid_argument);
  CHECK_NOTHROW(eval_metrics(a, open, 100, 1, false));

  // Two spheres offset by 0.05 against a dense-grid computation.
  const auto b = fixture::sphere(Vec3(0.55, 0.5, 0.5), 0.3);
  const auto m = eval_metrics(a, b, 20000, 2);
  const int res = 160;
  std::size_t inter = 0, uni = 0;
  const Aabb box{Vec3(0.2, 0.2, 0.2), Vec3(0.85, 0.8, 0.8)};
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        const Vec3 p = box.min + (Vec3(x, y, z) + Vec3::Constant(0.5)).cwiseProduct(box.size()) / res;
        const bool ia = (p - Vec3(0.5, 0.5, 0.5)).norm() < 0.3, ib = (p - Vec3(0.55, 0.5, 0.5)).norm() < 0.3;
        inter += ia && ib;
        uni += ia || ib;
      }
  const double iou_ref = double(inter) / uni;
  CHECK(*m.volumetric_iou == doctest::Approx(iou_ref).epsilon(0.05));

  // Dense analytic chamfer: mean distance from points on one sphere to the other.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  double acc = 0;
  const int ns = 20000;
  for (int i = 0; i < ns; ++i) {
    const Vec3 d = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const Vec3 p = Vec3(0.5, 0.5, 0.5) + 0.3 * d;
    acc += std::abs((p - Vec3(0.55, 0.5, 0.5)).norm() - 0.3);
  }
  CHECK(m.chamfer == doctest::Approx(acc / ns).epsilon(0.05));

  TriangleMesh ca = a, cb = a;
  ca.colors.assign(a.vertices.size(), Vec3(1, 0, 0));
  cb.colors.assign(a.vertices.size(), Vec3(0, 0, 0));
  CHECK(*eval_metrics(ca, cb, 1000, 1, false).texture_mae == doctest::Approx(255.0 / 3));
}
