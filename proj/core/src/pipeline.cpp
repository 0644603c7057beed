// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <numeric>
#include <random>

#include "texrecon/container.hpp"
#include "texrecon/hash.hpp"
#include "texrecon/marching_cubes.hpp"
#include "texrecon/ops.hpp"

namespace texrecon {

namespace {

constexpr const char* kEncoder = "enc";
constexpr const char* kHead = "head";
constexpr const char* kDecoder = "dec";

const Aabb kUnitBox{Vec3::Zero(), Vec3::Ones()};

std::string phase_tag(Mode mode, const std::string& phase) { return to_string(mode) + "-" + phase; }

void check_phase(Mode mode, const std::string& phase) {
  if (std::find(kPhases.begin(), kPhases.end(), phase) == kPhases.end()) {
    throw std::invalid_argument("unknown phase '" + phase + "' (expected pose, bbox, shape or texture)");
  }
  if (!phase_applies(mode, phase)) {
    throw std::invalid_argument("phase '" + phase + "' does not apply to " + to_string(mode) + " mode");
  }
}

bool uses_prior(const RunConfig& cfg, Mode mode) { return mode == Mode::kBody && cfg.ablation.prior; }
bool uses_bbox(const RunConfig& cfg, Mode mode) { return mode == Mode::kObject && cfg.ablation.bbox; }

Tensor concat_prior(const Tensor& partial, const OccupancyGrid& prior) {
  const Tensor p = grid_tensor(prior, false);
  return concat_channels({&partial, &p});
}

OccupancyGrid voxelize_normalized(const TriangleMesh& mesh, const RunConfig& cfg, std::uint64_t seed) {
  return voxelize_in_frame(mesh, SimilarityTransform{}, cfg.model.resolution, cfg.model.voxel_samples, seed);
}

}  // namespace

bool phase_applies(Mode mode, const std::string& phase) {
  if (phase == "pose") return mode == Mode::kBody;
  if (phase == "bbox") return mode == Mode::kObject;
  return phase == "shape" || phase == "texture";
}

std::vector<std::string> required_phases(const RunConfig& cfg, Mode mode, bool with_texture) {
  std::vector<std::string> out;
  if (uses_prior(cfg, mode)) out.push_back("pose");
  if (uses_bbox(cfg, mode)) out.push_back("bbox");
  out.push_back("shape");
  if (with_texture) out.push_back("texture");
  return out;
}

EncoderConfig phase_encoder(const RunConfig& cfg, Mode mode, const std::string& phase) {
  check_phase(mode, phase);
  EncoderConfig e = cfg.model.encoder;
  if (phase == "texture") e.input_channels = 4;
  else if (phase == "shape" && uses_prior(cfg, mode)) e.input_channels = 2;
  else e.input_channels = 1;
  return e;
}

MlpSpec phase_decoder(const RunConfig& cfg, Mode mode, const std::string& phase) {
  if (phase != "shape" && phase != "texture") throw std::invalid_argument("phase '" + phase + "' has no decoder");
  const EncoderConfig e = phase_encoder(cfg, mode, phase);
  return decoder_spec(kDecoder, e.feature_width(), cfg.model.decoder_hidden, phase == "shape" ? 1 : 3);
}

Skeleton25 skeleton_to_frame(const Skeleton25& world, const SimilarityTransform& frame) {
  return world.transformed(frame.scale, frame.offset);
}

Skeleton25 rest_skeleton_in_frame(const RunConfig& cfg) {
  return skeleton_to_frame(rest_skeleton(), frame_for_box(cfg.model.body_box));
}

TriangleMesh prior_mesh_in_frame(const RunConfig& cfg, const Skeleton25& skel) {
  const double s = frame_for_box(cfg.model.body_box).scale;
  auto radii = default_bone_radii();
  for (auto& r : radii) r *= s;
  return skeleton_to_prior_mesh(skel, radii, cfg.model.prior_resolution);
}

ParamStore init_phase_model(const RunConfig& cfg, Mode mode, const std::string& phase, std::uint64_t seed) {
  const EncoderConfig e = phase_encoder(cfg, mode, phase);
  ParamStore store;
  std::mt19937_64 rng(seed);
  init_encoder(store, e, kEncoder, rng);
  const auto top = static_cast<std::size_t>(e.channels.back());
  if (phase == "pose") {
    const auto bias = rest_skeleton_in_frame(cfg).flat();
    init_global_head(store, kHead, top, HeadKind::kPose, cfg.model.head, rng, bias);
  } else if (phase == "bbox") {
    init_global_head(store, kHead, top, HeadKind::kBbox, cfg.model.head, rng);
  } else {
    init_mlp(store, phase_decoder(cfg, mode, phase), rng, cfg.phase(phase).zero_init_decoder);
  }
  return store;
}

std::filesystem::path models_dir(const RunConfig& cfg) {
  std::string name = "checkpoints";
  if (!cfg.ablation.prior) name += "-no-prior";
  if (!cfg.ablation.bbox) name += "-no-bbox";
  if (!cfg.ablation.balanced) name += "-no-balanced";
  return cfg.output_dir / name;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Mode mode, const std::string& phase) {
  return dir / (phase_tag(mode, phase) + ".ckpt");
}

std::filesystem::path loss_csv_path(const std::filesystem::path& dir, Mode mode, const std::string& phase) {
  return dir / (phase_tag(mode, phase) + ".loss.csv");
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct TrainCase {
  std::string id;
  Tensor input;
  TriangleMesh target;  // normalized ground truth
  std::unique_ptr<InsideTester> inside;
  std::vector<double> head_target;
};

std::vector<TrainCase> prepare_cases(const RunConfig& cfg, Mode mode, const std::string& phase,
                                     const DatasetManifest& manifest) {
  std::vector<TrainCase> cases;
  const int k = cfg.model.resolution;
  const std::size_t samples = cfg.model.voxel_samples;
  const PhaseConfig& pc = cfg.phase(phase);
  for (const ManifestEntry* e : manifest.split("train")) {
    if (e->kind != to_string(mode)) continue;
    const TriangleMesh partial = load_mesh(manifest.resolve(e->partial_path));
    const TriangleMesh gt = load_mesh(manifest.resolve(e->gt_path));
    const std::uint64_t vseed = mix_seed(e->seed, 11);
    if (phase == "pose") {
      if (!e->skeleton_path) throw std::invalid_argument("train: body entry " + e->id + " has no skeleton");
      const SimilarityTransform frame = frame_for_box(cfg.model.body_box);
      TrainCase c;
      c.id = e->id;
      c.input = grid_tensor(voxelize_in_frame(partial, frame, k, samples, vseed), false);
      c.head_target = skeleton_to_frame(load_skeleton(manifest.resolve(*e->skeleton_path)), frame).flat();
      cases.push_back(std::move(c));
    } else if (phase == "bbox") {
      const Aabb gt_box = tight_aabb(gt).padded(kDegeneratePad);
      auto add_partial = [&](const TriangleMesh& scan, const std::string& id, std::uint64_t seed) {
        const Aabb tight = tight_aabb(scan).padded(kDegeneratePad);
        TrainCase c;
        c.id = id;
        c.input = grid_tensor(voxelize_in_frame(scan, frame_for_box(tight), k, samples, seed), false);
        const RelBox rel = abs_to_rel(gt_box, tight);
        c.head_target.assign(rel.begin(), rel.end());
        cases.push_back(std::move(c));
      };
      add_partial(partial, e->id, vseed);
      for (int i = 0; i < pc.extra_partials; ++i) {
        const std::uint64_t seed = mix_seed(e->seed, 100 + static_cast<std::uint64_t>(i));
        add_partial(make_partial(gt, seed, cfg.dataset.partial_mode, cfg.dataset.partial),
                    e->id + "/partial" + std::to_string(i), mix_seed(seed, 11));
      }
      if (pc.complete_copies) {
        TrainCase full;
        full.id = e->id + "/complete";
        full.input = grid_tensor(voxelize_in_frame(gt, frame_for_box(gt_box), k, samples, vseed), false);
        full.head_target.assign(6, 0.0);
        cases.push_back(std::move(full));
      }
    } else {
      const Aabb box = mode == Mode::kBody ? cfg.model.body_box : (uses_bbox(cfg, mode) ? tight_aabb(gt) : tight_aabb(partial));
      const SimilarityTransform frame = frame_for_box(box);
      const OccupancyGrid grid = voxelize_in_frame(partial, frame, k, samples, vseed);
      TrainCase c;
      c.id = e->id;
      c.target = frame.apply(gt);
      if (phase == "texture") {
        if (!gt.has_colors() || !grid.has_colors()) throw std::invalid_argument("train: " + e->id + " has no colors");
        c.input = grid_tensor(grid, true);
      } else {
        c.input = grid_tensor(grid, false);
        c.inside = std::make_unique<InsideTester>(c.target);
        if (uses_prior(cfg, mode)) {
          if (!e->skeleton_path) throw std::invalid_argument("train: body entry " + e->id + " has no skeleton");
          Skeleton25 skel = skeleton_to_frame(load_skeleton(manifest.resolve(*e->skeleton_path)), frame);
          std::mt19937_64 jrng(mix_seed(e->seed, 13));
          std::normal_distribution<double> jitter(0.0, pc.joint_jitter);
          for (auto& j : skel.joints) {
            for (int a = 0; a < 3; ++a) j[a] += pc.joint_jitter > 0 ? jitter(jrng) : 0.0;
          }
          const OccupancyGrid prior = voxelize_normalized(prior_mesh_in_frame(cfg, skel), cfg, mix_seed(e->seed, 17));
          c.input = concat_prior(c.input, prior);
        }
      }
      cases.push_back(std::move(c));
    }
  }
  if (cases.empty()) {
    throw std::invalid_argument("train: the manifest has no " + to_string(mode) + " cases in the train split");
  }
  return cases;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TrainResult train_phase(const RunConfig& cfg, Mode mode, const std::string& phase, const DatasetManifest& manifest,
                        const std::filesystem::path& out_dir, std::ostream* log) {
  check_phase(mode, phase);
  cfg.validate();
  if (!manifest.config_hash.empty() && manifest.config_hash != cfg.dataset_hash()) {
    throw ConfigMismatchError("train: manifest was built with dataset settings " + manifest.config_hash +
                              " but the config describes " + cfg.dataset_hash());
  }
  const PhaseConfig& pc = cfg.phase(phase);
  const EncoderConfig enc = phase_encoder(cfg, mode, phase);
  const std::uint64_t base = mix_seed(cfg.seed, fnv1a64(phase_tag(mode, phase)));

  std::vector<TrainCase> cases = prepare_cases(cfg, mode, phase, manifest);
  TrainResult result;
  result.params = init_phase_model(cfg, mode, phase, base);
  ParamStore& store = result.params;
  const MlpSpec dec = (phase == "shape" || phase == "texture") ? phase_decoder(cfg, mode, phase) : MlpSpec{};
  const BceWeighting bce = cfg.ablation.balanced ? pc.bce : BceWeighting::kUniform;
  const double normal_sigma = pc.normal_sigma_voxels / static_cast<double>(cfg.model.resolution);

  std::filesystem::create_directories(out_dir);
  result.checkpoint = checkpoint_path(out_dir, mode, phase);
  result.loss_csv = loss_csv_path(out_dir, mode, phase);
  std::ofstream csv(result.loss_csv, std::ios::binary);
  if (!csv) throw std::runtime_error("train: cannot write " + result.loss_csv.string());
  csv << "epoch,step,loss,phase,seed\n";

  std::vector<std::size_t> order(cases.size());
  std::iota(order.begin(), order.end(), 0);
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= pc.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(mix_seed(base, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_sum = 0;
    std::size_t epoch_steps = 0;
    for (std::size_t idx : order) {
      TrainCase& c = cases[idx];
      const auto input = std::make_shared<Tensor>(c.input);
      for (int rep = 0; rep < pc.steps_per_case; ++rep) {
        ++step;
        const std::uint64_t qseed = mix_seed(base, 0x100000000ULL + static_cast<std::uint64_t>(step));
        Tape tape;
        const MultiScaleFeatures msf = encode(tape, input, store, enc, kEncoder);
        TensorPtr loss;
        if (phase == "pose") {
          const TensorPtr pred = global_head(tape, msf, store, kHead, HeadKind::kPose, cfg.model.head);
          loss = pose_loss(tape, pred, Skeleton25::from_flat(c.head_target));
        } else if (phase == "bbox") {
          const TensorPtr pred = global_head(tape, msf, store, kHead, HeadKind::kBbox, cfg.model.head);
          RelBox rel;
          std::copy(c.head_target.begin(), c.head_target.end(), rel.begin());
          loss = bbox_loss(tape, pred, rel);
        } else if (phase == "shape") {
          const QueryBatch q = sample_shape_queries(c.target, *c.inside, pc.queries, pc.sigmas, qseed);
          const TensorPtr pred = shape_decode(tape, store, dec, query_features(tape, msf, q.points, enc.pe_bands));
          loss = balanced_bce(tape, pred, q.labels, bce);
        } else {
          const QueryBatch q = sample_texture_queries(c.target, pc.queries, normal_sigma, qseed);
          const TensorPtr pred = texture_decode(tape, store, dec, query_features(tape, msf, q.points, enc.pe_bands));
          loss = texture_loss(tape, pred, q.labels);
        }
        const double value = loss->item();
        backward(loss, tape);
        adam_step(store, pc.lr);
        result.steps.push_back({epoch, step, value});
        csv << epoch << ',' << step << ',' << format_double(value) << ',' << phase << ',' << cfg.seed << '\n';
        epoch_sum += value;
        ++epoch_steps;
      }
    }
    const double mean = epoch_sum / static_cast<double>(epoch_steps);
    result.epoch_losses.push_back(mean);
    CheckpointInfo info;
    info.phase = phase_tag(mode, phase);
    info.config_hash = cfg.hash();
    info.attributes["epoch"] = std::to_string(epoch);
    info.attributes["seed"] = std::to_string(cfg.seed);
    save_checkpoint(result.checkpoint, store, info);
    if (log) *log << phase_tag(mode, phase) << " epoch " << epoch << "/" << pc.epochs << " loss " << mean << '\n';
  }
  csv.flush();
  if (!csv) throw std::runtime_error("train: failed writing " + result.loss_csv.string());
  return result;
}

// ---------------------------------------------------------------------------
// Inference

ModelSet load_models(const RunConfig& cfg, Mode mode, const std::filesystem::path& dir, bool with_texture) {
  ModelSet set;
  set.mode = mode;
  for (const auto& phase : required_phases(cfg, mode, with_texture)) {
    const auto path = checkpoint_path(dir, mode, phase);
    if (!std::filesystem::exists(path)) throw PipelineError("load", "missing checkpoint " + path.string());
    ParamStore store = load_checkpoint(path, nullptr, cfg.hash(), phase_tag(mode, phase));
    store.set_trainable(false);
    set.params.emplace(phase, std::move(store));
  }
  return set;
}

namespace {

class StageClock {
 public:
  explicit StageClock(PipelineOutput& out) : out_(out), t0_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& stage) {
    const auto t1 = std::chrono::steady_clock::now();
    out_.timings.emplace_back(stage, std::chrono::duration<double>(t1 - t0_).count());
    t0_ = t1;
  }

 private:
  PipelineOutput& out_;
  std::chrono::steady_clock::time_point t0_;
};

const ParamStore& need(const ModelSet& models, const std::string& phase) {
  auto it = models.params.find(phase);
  if (it == models.params.end()) throw PipelineError(phase, "no " + phase + " checkpoint loaded");
  return it->second;
}

}  // namespace

PipelineOutput infer_pipeline(const TriangleMesh& partial, const RunConfig& cfg, const ModelSet& models,
                              const InferOptions& options) {
  if (partial.empty()) throw PipelineError("input", "partial mesh is empty");
  partial.validate();
  const Mode mode = models.mode;
  const int k = cfg.model.resolution;
  const std::size_t samples = cfg.model.voxel_samples;
  const std::uint64_t vseed = mix_seed(options.seed, 11);

  PipelineOutput out;
  out.mode = mode;
  out.config_hash = cfg.hash();
  out.tight_box = tight_aabb(partial).padded(kDegeneratePad);
  StageClock clock(out);

  Aabb shape_box = out.tight_box;
  std::optional<OccupancyGrid> prior_grid;
  if (mode == Mode::kObject && uses_bbox(cfg, mode)) {
    const ParamStore& store = need(models, "bbox");
    const OccupancyGrid grid = voxelize_in_frame(partial, frame_for_box(out.tight_box), k, samples, vseed);
    Tape tape;
    const auto msf = encode(tape, grid, store, phase_encoder(cfg, mode, "bbox"), kEncoder);
    const TensorPtr pred = global_head(tape, msf, store, kHead, HeadKind::kBbox, cfg.model.head);
    RelBox rel;
    std::copy(pred->data().begin(), pred->data().end(), rel.begin());
    out.relative_box = rel;
    out.predicted_box = rel_to_abs(rel, out.tight_box);
    shape_box = *out.predicted_box;
    clock.lap("bbox");
    if (cfg.ablation.filter && !completeness_test(*out.predicted_box, rel, cfg.model.thresholds)) {
      out.completion_ran = false;
      out.completed = partial;
      return out;
    }
  }
  if (mode == Mode::kBody) {
    shape_box = cfg.model.body_box;
    if (uses_prior(cfg, mode)) {
      const ParamStore& store = need(models, "pose");
      const SimilarityTransform frame = frame_for_box(shape_box);
      const OccupancyGrid grid = voxelize_in_frame(partial, frame, k, samples, vseed);
      Tape tape;
      const auto msf = encode(tape, grid, store, phase_encoder(cfg, mode, "pose"), kEncoder);
      const TensorPtr pred = global_head(tape, msf, store, kHead, HeadKind::kPose, cfg.model.head);
      Skeleton25 skel = Skeleton25::from_flat(pred->data());
      for (auto& j : skel.joints) j = j.cwiseMax(0.0).cwiseMin(1.0);
      const TriangleMesh prior = prior_mesh_in_frame(cfg, skel);
      if (prior.empty()) throw PipelineError("pose", "prior mesh is empty");
      prior_grid = voxelize_normalized(prior, cfg, mix_seed(options.seed, 17));
      out.skeleton = skel.transformed(1.0 / frame.scale, -frame.offset / frame.scale);
      out.prior_mesh = frame.invert(prior);
      clock.lap("pose");
    }
  }

  const SimilarityTransform frame = frame_for_box(shape_box);
  const OccupancyGrid grid = voxelize_in_frame(partial, frame, k, samples, vseed);
  {
    const ParamStore& store = need(models, "shape");
    Tensor input = grid_tensor(grid, false);
    if (prior_grid) input = concat_prior(input, *prior_grid);
    Tape tape;
    const auto msf = encode(tape, std::make_shared<Tensor>(std::move(input)), store,
                            phase_encoder(cfg, mode, "shape"), kEncoder);
    const auto lattice = lattice_points(k);
    const auto field = decode_occupancy(msf, store, phase_decoder(cfg, mode, "shape"), cfg.model.encoder.pe_bands,
                                        lattice);
    const TriangleMesh raw = marching_cubes(field, k, 0.5, kUnitBox);
    if (raw.empty()) throw PipelineError("shape", "marching cubes found no surface in the decoded field");
    out.raw_mesh = frame.invert(raw);
    clock.lap("shape");
  }
  if (cfg.ablation.fusion) {
    const double tau = cfg.model.fusion_tau_voxels / static_cast<double>(k) / frame.scale;
    out.fused_mesh = shape_fusion(*out.raw_mesh, partial, tau);
    out.completed = *out.fused_mesh;
    clock.lap("fusion");
  } else {
    out.completed = *out.raw_mesh;
  }

  if (options.texture) {
    const ParamStore& store = need(models, "texture");
    if (!grid.has_colors()) throw PipelineError("texture", "partial mesh has no colors");
    Tape tape;
    const auto msf = encode(tape, std::make_shared<Tensor>(grid_tensor(grid, true)), store,
                            phase_encoder(cfg, mode, "texture"), kEncoder);
    std::vector<double> pts;
    pts.reserve(3 * out.completed.vertices.size());
    for (const auto& v : out.completed.vertices) {
      const Vec3 p = frame.apply(v);
      pts.insert(pts.end(), {p.x(), p.y(), p.z()});
    }
    const auto colors = decode_colors(msf, store, phase_decoder(cfg, mode, "texture"), cfg.model.encoder.pe_bands, pts);
    const std::size_t keep = cfg.ablation.fusion && partial.has_colors() ? partial.vertices.size() : 0;
    out.completed.colors.resize(out.completed.vertices.size());
    for (std::size_t i = keep; i < colors.size(); ++i) out.completed.colors[i] = colors[i];
    clock.lap("texture");
  }
  for (auto& c : out.completed.colors) c = c.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

void write_pipeline_artifacts(const PipelineOutput& out, const std::filesystem::path& output) {
  using Json = nlohmann::ordered_json;
  const auto dir = output.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  save_mesh(out.completed, output);
  const std::string stem = output.stem().string();
  auto sibling = [&](const std::string& suffix) { return dir / (stem + suffix); };
  auto box = [](const Aabb& b) {
    return Json::array({b.min.x(), b.min.y(), b.min.z(), b.max.x(), b.max.y(), b.max.z()});
  };
  Json j;
  j["mode"] = to_string(out.mode);
  j["config_hash"] = out.config_hash;
  j["completion_ran"] = out.completion_ran;
  j["tight_box"] = box(out.tight_box);
  if (out.relative_box) j["relative_box"] = *out.relative_box;
  if (out.predicted_box) j["predicted_box"] = box(*out.predicted_box);
  if (out.skeleton) {
    Json joints = Json::array();
    for (const auto& p : out.skeleton->joints) joints.push_back({p.x(), p.y(), p.z()});
    j["skeleton"] = joints;
  }
  Json artifacts = Json::object();
  if (out.prior_mesh) {
    save_mesh(*out.prior_mesh, sibling(".prior.obj"));
    artifacts["prior"] = stem + ".prior.obj";
  }
  if (out.raw_mesh) {
    save_mesh(*out.raw_mesh, sibling(".raw.obj"));
    artifacts["raw"] = stem + ".raw.obj";
  }
  if (out.fused_mesh) {
    save_mesh(*out.fused_mesh, sibling(".fused.obj"));
    artifacts["fused"] = stem + ".fused.obj";
  }
  j["artifacts"] = artifacts;
  j["vertices"] = out.completed.vertices.size();
  j["faces"] = out.completed.faces.size();
  Json timings = Json::object();
  for (const auto& [stage, seconds] : out.timings) timings[stage] = seconds;
  j["timings"] = timings;
  std::ofstream f(sibling(".json"), std::ios::binary);
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + sibling(".json").string());
}

}  // namespace texrecon
