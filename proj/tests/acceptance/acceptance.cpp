// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   texrecon_acceptance [criteria...] [--workdir DIR] [--configs DIR]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "fixtures.hpp"
#include "texrecon/completion.hpp"
#include "texrecon/grad_suite.hpp"
#include "texrecon/hash.hpp"
#include "texrecon/inside.hpp"
#include "texrecon/marching_cubes.hpp"
#include "texrecon/ops.hpp"
#include "texrecon/pipeline.hpp"
#include "texrecon/report.hpp"
#include "texrecon/sampling.hpp"
#include "texrecon/synthetic.hpp"

namespace fs = std::filesystem;
using namespace texrecon;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. gradient suite

Verdict grad_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::string name;
  for (const auto& r : run_grad_suite(0)) {
    if (!(r.max_rel_error <= worst)) {
      worst = r.max_rel_error;
      name = r.name;
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && t < 300,
          "max rel error " + fmt("%.3g", worst) + " (" + name + "), " + fmt("%.1f", t) + " s"};
}

// ---------------------------------------------------------------------------
// 2. kernel oracles

Verdict kernel_oracles() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> small(1, 3), side(2, 6);
  double conv = 0, pool = 0, norm = 0, tri = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t ci = small(rng), co = small(rng), d = side(rng), h = side(rng), w = side(rng);
    const int k = std::uniform_int_distribution<int>(0, 1)(rng) ? 3 : 1;
    const int pad = k == 3 ? std::uniform_int_distribution<int>(0, 1)(rng) : 0;
    if (k == 3 && pad == 0 && (d < 3 || h < 3 || w < 3)) {
      --i;
      continue;
    }
    const Tensor x = oracle::random_tensor({ci, d, h, w}, rng);
    const Tensor ker = oracle::random_tensor({co, ci, std::size_t(k), std::size_t(k), std::size_t(k)}, rng);
    const Tensor b = oracle::random_tensor({co}, rng);
    Tape tape;
    const auto y = conv3d(tape, std::make_shared<Tensor>(x), std::make_shared<Tensor>(ker), std::make_shared<Tensor>(b), pad);
    conv = std::max(conv, oracle::max_abs_diff(*y, oracle::conv3d(x, ker, b, pad)));
  }
  for (int i = 0; i < 100; ++i) {
    const std::size_t c = small(rng), n = 2 * std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const Tensor x = oracle::random_tensor({c, n, n, n}, rng);
    Tape tape;
    pool = std::max(pool, oracle::max_abs_diff(*maxpool3d(tape, std::make_shared<Tensor>(x), 2), oracle::maxpool3d(x, 2)));
  }
  for (int i = 0; i < 100; ++i) {
    const Tensor x = oracle::random_tensor({std::size_t(small(rng)), std::size_t(side(rng)), std::size_t(side(rng)),
                                            std::size_t(side(rng))},
                                           rng, -3, 3);
    Tape tape;
    norm = std::max(norm, oracle::max_abs_diff(*instance_norm(tape, std::make_shared<Tensor>(x), 1e-5),
                                               oracle::instance_norm(x, 1e-5)));
  }
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  for (int i = 0; i < 100; ++i) {
    const std::size_t c = small(rng);
    const Tensor g = oracle::random_tensor({c, std::size_t(side(rng)), std::size_t(side(rng)), std::size_t(side(rng))}, rng);
    std::vector<double> pts(3 * 16);
    for (auto& v : pts) v = u(rng);
    Tape tape;
    const auto y = trilinear_sample(tape, std::make_shared<Tensor>(g), pts);
    for (std::size_t p = 0; p < 16; ++p) {
      const auto want = oracle::trilinear(g, pts[3 * p], pts[3 * p + 1], pts[3 * p + 2]);
      for (std::size_t ch = 0; ch < c; ++ch) tri = std::max(tri, std::abs(y->data()[p * c + ch] - want[ch]));
    }
  }
  const double worst = std::max({conv, pool, norm, tri});
  return {worst <= 1e-12, "conv3d " + fmt("%.2g", conv) + ", maxpool3d " + fmt("%.2g", pool) + ", instance_norm " +
                              fmt("%.2g", norm) + ", trilinear " + fmt("%.2g", tri)};
}

// ---------------------------------------------------------------------------
// 3. geometry

Verdict geometry() {
  const int k = 64;
  const Aabb unit{Vec3::Zero(), Vec3::Ones()};
  const double r = 0.3;
  std::vector<double> field(std::size_t(k) * k * k);
  for (int z = 0; z < k; ++z)
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) {
        const Vec3 p = Vec3(x, y, z) / (k - 1) - Vec3::Constant(0.5);
        field[(std::size_t(z) * k + y) * k + x] = r - p.norm();
      }
  const TriangleMesh sphere = marching_cubes(field, k, 0.0, unit);
  double radial = 0;
  for (const auto& v : sphere.vertices) radial = std::max(radial, std::abs((v - Vec3::Constant(0.5)).norm() - r));
  const double cell = 1.0 / (k - 1);
  const bool sphere_ok = is_watertight(sphere) && euler_characteristic(sphere) == 2 && radial <= 1.5 * cell;

  double worst = 1;
  for (int s = 0; s < 20; ++s) {
    ObjectSpec spec = random_object_spec(1000 + s, 1.0, 1.0);
    spec.resolution = 48;
    const TriangleMesh mesh = gen_object(spec);
    const Aabb tight = tight_aabb(mesh);
    const Vec3 pad = Vec3::Constant(0.05 * tight.size().maxCoeff());
    const Aabb box{tight.min - pad, tight.max + pad};
    const int res = 48;
    const auto flood = oracle::flood_fill_labels(mesh, box, res);
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
    const auto got = occupancy_oracle(mesh, centers);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < got.size(); ++i) agree += got[i] == expect[i];
    worst = std::min(worst, double(agree) / double(got.size()));
  }
  return {sphere_ok && worst >= 0.999,
          std::string("sphere watertight ") + (is_watertight(sphere) ? "yes" : "no") + ", chi " +
              std::to_string(euler_characteristic(sphere)) + ", radial error " + fmt("%.3f", radial / cell) +
              " cells; oracle vs flood fill worst agreement " + fmt("%.5f", worst)};
}

// ---------------------------------------------------------------------------
// 4. loss identities

Verdict loss_identities() {
  double bce_err = 0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (double ones : {0.1, 0.5, 0.9, 0.0, 1.0}) {
    const std::size_t n = 40;
    std::vector<double> labels(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = i < std::size_t(std::lround(ones * n)) ? 1.0 : 0.0;
      p[i] = u(rng);
    }
    const double frac1 = std::accumulate(labels.begin(), labels.end(), 0.0) / n;
    const double wp = std::max(1 - frac1, kMinClassWeight), wn = std::max(frac1, kMinClassWeight);
    double want = 0;
    for (std::size_t i = 0; i < n; ++i) want += wp * labels[i] * std::log(p[i]) + wn * (1 - labels[i]) * std::log(1 - p[i]);
    want = -want / n;
    Tape tape;
    const double got =
        balanced_bce(tape, make_tensor({n}, p), labels, BceWeighting::kInverseFrequency)->item();
    bce_err = std::max(bce_err, std::abs(got - want));
  }
  {
    Tape tape;
    const std::vector<double> labels{1, 0, 1, 0};
    const double half = balanced_bce(tape, make_tensor({4}, 0.5), labels, BceWeighting::kInverseFrequency)->item();
    bce_err = std::max(bce_err, std::abs(half - 0.5 * std::log(2.0)));
  }

  const Skeleton25 gt = rest_skeleton();
  Skeleton25 one = gt;
  one.joints[4] += Vec3(0.3, 0.4, 0);
  const RelBox b{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  RelBox b2 = b;
  b2[0] += 0.1;
  Tape tape;
  const auto c = make_tensor({4, 3}, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.2, 0.4, 0.6});
  auto c2 = make_tensor({4, 3}, std::vector<double>(c->data().begin(), c->data().end()));
  c2->data()[3] += 0.1;
  c2->data()[4] += 0.2;
  const bool zeros = pose_loss(gt, gt) == 0.0 && bbox_loss(b, b) == 0.0 && texture_loss(tape, c, c->data())->item() == 0.0;
  const double e_pose = std::max(std::abs(pose_loss(gt.transformed(1.0, Vec3(1, 0, 0)), gt) - 1.0),
                                 std::abs(pose_loss(one, gt) - 0.028));
  const double e_box = std::abs(bbox_loss(b2, b) - 0.1);
  const double e_tex = std::max(std::abs(texture_loss(tape, make_tensor({4, 3}, 0.0), std::vector<double>(12, 1.0))->item() - 3.0),
                                std::abs(texture_loss(tape, c2, c->data())->item() - 0.075));
  const double worst = std::max({bce_err, e_pose, e_box, e_tex});
  return {zeros && worst <= 1e-12, std::string("identical inputs give 0: ") + (zeros ? "yes" : "no") +
                                       "; bce " + fmt("%.2g", bce_err) + ", pose " + fmt("%.2g", e_pose) +
                                       ", bbox " + fmt("%.2g", e_box) + ", texture " + fmt("%.2g", e_tex)};
}

// ---------------------------------------------------------------------------
// Shared training helpers

RunConfig desk_config(const fs::path& dir) {
  RunConfig cfg;
  cfg.output_dir = dir / "run";
  cfg.dataset.output_dir = dir / "data";
  cfg.model.resolution = 32;
  cfg.model.encoder.scales = 5;
  cfg.model.encoder.channels = {16, 32, 64, 64, 64};
  cfg.model.encoder.pe_bands = 6;
  cfg.model.head.hidden = {128, 128};
  cfg.model.decoder_hidden = {128, 128, 128};
  cfg.model.voxel_samples = 50000;
  cfg.model.prior_resolution = 48;
  return cfg;
}

DatasetManifest make_dataset(RunConfig& cfg) {
  cfg.dataset.config_hash = cfg.dataset_hash();
  fs::remove_all(cfg.dataset.output_dir);
  return build_dataset(cfg.dataset);
}

MultiScaleFeatures encode_case(Tape& tape, const RunConfig& cfg, const ParamStore& store, Mode mode,
                               const std::string& phase, const Tensor& input) {
  return encode(tape, std::make_shared<Tensor>(input), store, phase_encoder(cfg, mode, phase), "enc");
}

// ---------------------------------------------------------------------------
// 5. overfit

Verdict overfit(const fs::path& work) {
  RunConfig cfg = desk_config(work / "overfit");
  cfg.seed = 5;
  cfg.dataset.bodies = 0;
  cfg.dataset.objects = 4;
  cfg.dataset.seed = 5;
  cfg.dataset.splits = {1, 0, 0};
  cfg.dataset.object_resolution = 64;
  cfg.model.decoder_hidden = {256, 256, 256};
  cfg.ablation.bbox = true;
  PhaseConfig& shape = cfg.phases["shape"];
  shape.lr = 1e-3;
  shape.epochs = 500;
  shape.queries = 2048;
  const DatasetManifest m = make_dataset(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult tr = train_phase(cfg, Mode::kObject, "shape", m, cfg.output_dir);
  const double train_s = seconds_since(t0);

  const int k = cfg.model.resolution;
  const std::vector<double> lattice = lattice_points(k);
  std::vector<Vec3> lattice_vec(lattice.size() / 3);
  for (std::size_t i = 0; i < lattice_vec.size(); ++i) lattice_vec[i] = Vec3(lattice[3 * i], lattice[3 * i + 1], lattice[3 * i + 2]);
  const MlpSpec dec = phase_decoder(cfg, Mode::kObject, "shape");
  double worst = 1;
  std::string ious;
  for (const ManifestEntry& e : m.entries) {
    const TriangleMesh gt = load_mesh(m.resolve(e.gt_path));
    const TriangleMesh partial = load_mesh(m.resolve(e.partial_path));
    const SimilarityTransform frame = frame_for_box(tight_aabb(gt));
    const Tensor input = grid_tensor(
        voxelize_in_frame(partial, frame, k, cfg.model.voxel_samples, mix_seed(e.seed, 11)), false);
    Tape tape;
    const auto msf = encode_case(tape, cfg, tr.params, Mode::kObject, "shape", input);
    const auto occ = decode_occupancy(msf, tr.params, dec, cfg.model.encoder.pe_bands, lattice);
    const auto truth = occupancy_oracle(frame.apply(gt), lattice_vec);
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      const bool a = occ[i] >= 0.5, b = truth[i] != 0;
      inter += a && b;
      uni += a || b;
    }
    const double iou = uni ? double(inter) / double(uni) : 1.0;
    worst = std::min(worst, iou);
    ious += (ious.empty() ? "" : " ") + fmt("%.3f", iou);
  }

  // Uniformly red sphere for the texture network.
  RunConfig tcfg = desk_config(work / "overfit-texture");
  tcfg.seed = 5;
  PhaseConfig& tex = tcfg.phases["texture"];
  tex.lr = 1e-3;
  tex.epochs = 150;
  tex.queries = 1024;
  TriangleMesh sphere = fixture::sphere(Vec3::Zero(), 0.5, 40);
  sphere.colors.assign(sphere.vertices.size(), Vec3(1, 0, 0));
  DatasetManifest sm;
  sm.root = work / "overfit-texture" / "data";
  fs::create_directories(sm.root);
  save_mesh(sphere, sm.root / "sphere.gt.obj");
  save_mesh(cut_halfspace(sphere, Vec3(1, 0, 0), 0.1), sm.root / "sphere.partial.obj");
  ManifestEntry se;
  se.id = "sphere";
  se.kind = "object";
  se.gt_path = "sphere.gt.obj";
  se.partial_path = "sphere.partial.obj";
  se.tight_box = tight_aabb(load_mesh(sm.root / "sphere.partial.obj"));
  se.gt_box = tight_aabb(sphere);
  se.split = "train";
  se.seed = 1;
  sm.entries.push_back(se);
  const TrainResult tt = train_phase(tcfg, Mode::kObject, "texture", sm, tcfg.output_dir);
  const SimilarityTransform tframe = frame_for_box(tight_aabb(sphere));
  const Tensor tinput =
      grid_tensor(voxelize_in_frame(load_mesh(sm.root / "sphere.partial.obj"), tframe, tcfg.model.resolution,
                                    tcfg.model.voxel_samples, mix_seed(se.seed, 11)),
                  true);
  const QueryBatch q = sample_texture_queries(tframe.apply(sphere), 4096, 0.0, 99);
  Tape tape;
  const auto msf = encode_case(tape, tcfg, tt.params, Mode::kObject, "texture", tinput);
  const auto colors = decode_colors(msf, tt.params, phase_decoder(tcfg, Mode::kObject, "texture"),
                                    tcfg.model.encoder.pe_bands, q.points);
  double mae = 0;
  for (std::size_t i = 0; i < colors.size(); ++i)
    for (int c = 0; c < 3; ++c) mae += std::abs(colors[i][c] - q.labels[3 * i + c]);
  mae /= 3.0 * double(colors.size());

  const bool pass = worst >= 0.9 && train_s <= 600 && mae < 5.0 / 255.0;
  return {pass, "shape IoU " + ious + " in " + fmt("%.0f", train_s) + " s (" + std::to_string(tr.steps.size()) +
                    " steps); red sphere MAE " + fmt("%.2f", mae * 255) + "/255"};
}

// ---------------------------------------------------------------------------
// 6. priors

struct BoxPrediction {
  RelBox rel;
  Aabb abs;
  Aabb tight;
};

BoxPrediction predict_box(const RunConfig& cfg, const ParamStore& store, const TriangleMesh& mesh, std::uint64_t seed) {
  const Aabb tight = tight_aabb(mesh).padded(kDegeneratePad);
  const Tensor input = grid_tensor(
      voxelize_in_frame(mesh, frame_for_box(tight), cfg.model.resolution, cfg.model.voxel_samples, seed), false);
  Tape tape;
  const auto msf = encode_case(tape, cfg, store, Mode::kObject, "bbox", input);
  const auto out = global_head(tape, msf, store, "head", HeadKind::kBbox, cfg.model.head);
  RelBox rel;
  std::copy(out->data().begin(), out->data().end(), rel.begin());
  return {rel, rel_to_abs(rel, tight), tight};
}

Verdict priors(const fs::path& work) {
  RunConfig cfg = desk_config(work / "priors");
  cfg.seed = 6;
  cfg.dataset.bodies = 8;
  cfg.dataset.objects = 32;
  cfg.dataset.seed = 6;
  cfg.dataset.splits = {1, 0, 0};
  cfg.dataset.body_resolution = 48;
  cfg.dataset.object_resolution = 48;
  cfg.phases["pose"].lr = 1e-3;
  cfg.phases["pose"].epochs = 150;
  cfg.phases["bbox"].lr = 1e-4;
  cfg.phases["bbox"].epochs = 50;
  cfg.phases["bbox"].extra_partials = 6;
  const DatasetManifest m = make_dataset(cfg);

  const TrainResult pose = train_phase(cfg, Mode::kBody, "pose", m, cfg.output_dir);
  const SimilarityTransform bframe = frame_for_box(cfg.model.body_box);
  double pose_err = 0;
  int bodies = 0;
  for (const ManifestEntry& e : m.entries) {
    if (e.kind != "body") continue;
    const Tensor input = grid_tensor(voxelize_in_frame(load_mesh(m.resolve(e.partial_path)), bframe, cfg.model.resolution,
                                                       cfg.model.voxel_samples, mix_seed(e.seed, 11)),
                                     false);
    Tape tape;
    const auto msf = encode_case(tape, cfg, pose.params, Mode::kBody, "pose", input);
    const auto out = global_head(tape, msf, pose.params, "head", HeadKind::kPose, cfg.model.head);
    const Skeleton25 gt = skeleton_to_frame(load_skeleton(m.resolve(*e.skeleton_path)), bframe);
    pose_err += pose_loss(Skeleton25::from_flat(out->data()), gt);
    ++bodies;
  }
  pose_err /= bodies;

  const TrainResult bbox = train_phase(cfg, Mode::kObject, "bbox", m, cfg.output_dir);
  double worst_iou = 1, mean_iou = 0, tight_iou = 0;
  int objects = 0;
  struct Growth {
    double aspect, growth;
    bool incomplete;
  };
  auto growth_of = [](const BoxPrediction& p, bool incomplete) {
    const Vec3 s = p.abs.size();
    const double r0 = std::exp(p.rel[3]), r1 = std::exp(p.rel[4]), r2 = std::exp(p.rel[5]);
    return Growth{s.maxCoeff() / s.minCoeff(), std::max({r0, r1, r2}) / std::min({r0, r1, r2}), incomplete};
  };
  // Grid search over the candidate thresholds the predictions induce.
  auto tune = [](const std::vector<Growth>& samples, CompletenessThresholds& tuned) {
    std::vector<double> t1s{1e9}, t2s{1e9};
    for (const auto& s : samples) {
      t1s.push_back(s.aspect);
      t2s.push_back(s.growth);
    }
    double best = 0;
    for (double t1 : t1s)
      for (double t2 : t2s) {
        int right = 0;
        for (const auto& s : samples) right += ((s.aspect > t1 || s.growth > t2) == s.incomplete);
        const double acc = double(right) / double(samples.size());
        if (acc > best) {
          best = acc;
          tuned = {t1, t2};
        }
      }
    return best;
  };

  std::vector<Growth> halves, scans;
  std::mt19937_64 cut_rng(6);
  for (const ManifestEntry& e : m.entries) {
    if (e.kind != "object") continue;
    const TriangleMesh gt = load_mesh(m.resolve(e.gt_path));
    const BoxPrediction p = predict_box(cfg, bbox.params, load_mesh(m.resolve(e.partial_path)), mix_seed(e.seed, 11));
    const double iou = box_iou(p.abs, tight_aabb(gt));
    worst_iou = std::min(worst_iou, iou);
    mean_iou += iou;
    tight_iou += box_iou(p.tight, tight_aabb(gt));
    ++objects;
    const Growth complete = growth_of(predict_box(cfg, bbox.params, gt, mix_seed(e.seed, 11)), false);
    scans.push_back(growth_of(p, true));
    scans.push_back(complete);

    Vec3 normal = Vec3::Zero();
    normal[static_cast<int>(cut_rng() % 3)] = (cut_rng() % 2) ? 1.0 : -1.0;
    const TriangleMesh half = cut_halfspace(gt, normal, normal.dot(tight_aabb(gt).center()));
    halves.push_back(growth_of(predict_box(cfg, bbox.params, half, mix_seed(e.seed, 12)), true));
    halves.push_back(complete);
  }
  mean_iou /= objects;
  tight_iou /= objects;

  CompletenessThresholds tuned, tuned_scans;
  const double best = tune(halves, tuned);
  const double scans_acc = tune(scans, tuned_scans);

  const bool pass = pose_err < 0.05 && mean_iou >= 0.7 && best >= 0.9;
  return {pass, "pose L1 " + fmt("%.4f", pose_err) + "; bbox IoU mean " + fmt("%.3f", mean_iou) + " min " +
                    fmt("%.3f", worst_iou) + " (tight box " + fmt("%.3f", tight_iou) + "); half-cut completeness accuracy " + fmt("%.3f", best) + " at t1=" +
                    fmt("%.3g", tuned.t1) + " t2=" + fmt("%.4g", tuned.t2) + " (dataset partials " + fmt("%.3f", scans_acc) + ")"};
}

// ---------------------------------------------------------------------------
// 7. directional ablation

bool contains_partial(const TriangleMesh& out, const TriangleMesh& partial) {
  using Tri = std::array<double, 9>;
  auto key = [](const TriangleMesh& m, const Face& f) {
    Tri t;
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a) t[3 * i + a] = m.vertices[f[i]][a];
    return t;
  };
  std::set<Tri> have;
  for (const Face& f : out.faces) have.insert(key(out, f));
  return std::all_of(partial.faces.begin(), partial.faces.end(), [&](const Face& f) { return have.count(key(partial, f)) != 0; });
}

Verdict ablation(const fs::path& work, const fs::path& configs) {
  RunConfig cfg = RunConfig::load(configs / "desk.json");
  cfg.output_dir = work / "ablation" / "run";
  cfg.dataset.output_dir = work / "ablation" / "data";
  const DatasetManifest m = make_dataset(cfg);
  const auto test = m.split("test");

  RunConfig lean = cfg;
  lean.ablation = Ablation::from_list("prior,bbox,fusion");
  const auto t0 = std::chrono::steady_clock::now();
  for (const RunConfig* c : {&cfg, &lean})
    for (Mode mode : {Mode::kBody, Mode::kObject})
      for (const auto& phase : required_phases(*c, mode, false))
        train_phase(*c, mode, phase, m, models_dir(*c), &std::cerr);
  const double train_s = seconds_since(t0);

  RunConfig nofusion = cfg;
  nofusion.ablation.fusion = false;
  const std::vector<EvalArm> arms{{"full", cfg, models_dir(cfg)},
                                  {"no-fusion", nofusion, models_dir(cfg)},
                                  {"no-prior,bbox,fusion", lean, models_dir(lean)}};
  EvalOptions opts;
  opts.texture = false;
  opts.iou = false;
  const auto rows = evaluate_split(m, "test", arms, opts);
  const auto summary = summarize(rows);
  std::cerr << report_summary(rows);

  bool inclusion = true;
  std::map<Mode, ModelSet> models;
  for (Mode mode : {Mode::kBody, Mode::kObject}) models[mode] = load_models(cfg, mode, models_dir(cfg), false);
  for (const ManifestEntry* e : test) {
    const Mode mode = mode_from_string(e->kind);
    const TriangleMesh partial = load_mesh(m.resolve(e->partial_path));
    InferOptions io;
    io.texture = false;
    const PipelineOutput out = infer_pipeline(partial, cfg, models[mode], io);
    inclusion = inclusion && contains_partial(out.completed, partial);
  }

  const double full = summary[0].chamfer, nf = summary[1].chamfer, lean_c = summary[2].chamfer;
  const bool pass = test.size() >= 20 && full <= nf && nf <= lean_c && inclusion;
  return {pass, std::to_string(test.size()) + " test cases; mean chamfer full " + fmt("%.4f", full) + " <= no-fusion " +
                    fmt("%.4f", nf) + " <= no-prior,bbox,fusion " + fmt("%.4f", lean_c) + "; partial kept exactly: " +
                    (inclusion ? "yes" : "no") + "; training " + fmt("%.0f", train_s) + " s"};
}

// ---------------------------------------------------------------------------
// 8. end-to-end determinism

Verdict determinism(const fs::path& work, const fs::path& configs) {
  std::vector<std::map<std::string, std::string>> runs;
  for (int r = 0; r < 2; ++r) {
    const fs::path root = work / "determinism" / ("run" + std::to_string(r));
    fs::remove_all(root);
    fs::create_directories(root);
    RunConfig cfg = RunConfig::load(configs / "smoke.json");
    cfg.output_dir = root / "out";
    cfg.dataset.output_dir = root / "data";
    cfg.seed = 8;
    cfg.dataset.seed = 8;
    cfg.train.epochs = 2;
    for (auto& [name, pc] : cfg.phases) pc.epochs = 2;
    const fs::path cpath = root / "config.json";
    std::ofstream(cpath) << cfg.to_json();
    std::ostringstream out, err;
    auto call = [&](std::vector<std::string> args) {
      const int code = cli::run(args, out, err);
      if (code != 0) throw std::runtime_error("texrecon " + args[0] + " failed: " + err.str());
    };
    call({"gen-data", "--config", cpath.string()});
    std::map<std::string, std::string> files;
    files["manifest.jsonl"] = slurp(cfg.dataset.output_dir / "manifest.jsonl");
    const DatasetManifest m = read_manifest(cfg.dataset.output_dir / "manifest.jsonl");
    for (const char* mode : {"body", "object"}) {
      call({"train", "--config", cpath.string(), "--phase", "all", "--mode", mode});
    }
    for (const auto& entry : fs::directory_iterator(models_dir(cfg))) {
      if (entry.path().extension() == ".csv") files[entry.path().filename().string()] = slurp(entry.path());
    }
    for (const ManifestEntry* e : m.split("test")) {
      const fs::path o = root / "infer" / (e->id + ".obj");
      call({"infer", "--config", cpath.string(), "--mode", e->kind, "--input", m.resolve(e->partial_path).string(),
            "--output", o.string()});
      for (const auto& entry : fs::directory_iterator(o.parent_path())) {
        if (entry.path().extension() == ".obj") files["infer/" + entry.path().filename().string()] = slurp(entry.path());
      }
    }
    runs.push_back(std::move(files));
  }
  std::size_t same = 0;
  std::string diff;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it != runs[1].end() && it->second == bytes && !bytes.empty()) {
      ++same;
    } else if (diff.empty()) {
      diff = name;
    }
  }
  const bool pass = same == runs[0].size() && runs[0].size() == runs[1].size() && runs[0].size() > 3;
  return {pass, std::to_string(same) + "/" + std::to_string(runs[0].size()) + " files byte-identical" +
                    (diff.empty() ? "" : " (first difference: " + diff + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"texrecon acceptance criteria"};
  std::vector<int> selected;
  std::string workdir = (fs::temp_directory_path() / "texrecon-acceptance").string();
  std::string configs = TEXRECON_CONFIG_DIR;
  app.add_option("criteria", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--workdir", workdir, "Scratch directory");
  app.add_option("--configs", configs, "Directory holding desk.json and smoke.json");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const fs::path work = workdir;
  const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
      {1, {"gradient suite", grad_suite}},
      {2, {"kernel oracles", kernel_oracles}},
      {3, {"geometry", geometry}},
      {4, {"loss identities", loss_identities}},
      {5, {"overfit", [&] { return overfit(work); }}},
      {6, {"priors", [&] { return priors(work); }}},
      {7, {"directional ablation", [&] { return ablation(work, configs); }}},
      {8, {"end-to-end determinism", [&] { return determinism(work, configs); }}},
  };
  bool all = true;
  for (int id : selected) {
    const auto& [name, fn] = criteria.at(id);
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << id << " " << name << ": " << (v.pass ? "PASS" : "FAIL") << " | " << v.detail << " | "
              << fmt("%.1f", seconds_since(t0)) << " s" << std::endl;
  }
  return all ? 0 : 1;
}
