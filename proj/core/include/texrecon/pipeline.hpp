// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "texrecon/completion.hpp"
#include "texrecon/config.hpp"
#include "texrecon/param_store.hpp"
#include "texrecon/priors.hpp"
#include "texrecon/synthetic.hpp"

namespace texrecon {

/// pose is body only, bbox is object only, shape and texture exist for both.
bool phase_applies(Mode mode, const std::string& phase);
/// Phases inference needs for `mode` under the run's ablation settings.
std::vector<std::string> required_phases(const RunConfig& cfg, Mode mode, bool with_texture);

/// Encoder settings (input channel count included) for one network.
EncoderConfig phase_encoder(const RunConfig& cfg, Mode mode, const std::string& phase);
/// Decoder of the shape or texture network.
MlpSpec phase_decoder(const RunConfig& cfg, Mode mode, const std::string& phase);
/// Fresh parameters for one network.
ParamStore init_phase_model(const RunConfig& cfg, Mode mode, const std::string& phase, std::uint64_t seed);

/// Checkpoint directory of a run: "<output_dir>/checkpoints", suffixed with
/// the disabled training-relevant components (e.g. "checkpoints-no-prior").
std::filesystem::path models_dir(const RunConfig& cfg);

/// "<dir>/<mode>-<phase>.ckpt"; the loss trace sits next to it as ".loss.csv".
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Mode mode, const std::string& phase);
std::filesystem::path loss_csv_path(const std::filesystem::path& dir, Mode mode, const std::string& phase);

/// Body skeleton in the normalized body frame.
Skeleton25 skeleton_to_frame(const Skeleton25& world, const SimilarityTransform& frame);
/// Rest pose in the normalized body frame; seeds the pose head output.
Skeleton25 rest_skeleton_in_frame(const RunConfig& cfg);
/// Capsule prior mesh for a normalized-frame skeleton.
TriangleMesh prior_mesh_in_frame(const RunConfig& cfg, const Skeleton25& skel);

struct LossRow {
  int epoch = 0;
  std::int64_t step = 0;
  double loss = 0;
};

struct TrainResult {
  std::filesystem::path checkpoint;
  std::filesystem::path loss_csv;
  std::vector<LossRow> steps;         // one row per optimizer step
  std::vector<double> epoch_losses;   // mean loss per epoch
  ParamStore params;
};

/// Optimizes one network on the manifest's training split of `mode` with
/// Adam at batch size 1. Writes the loss CSV (epoch, step, loss, phase, seed)
/// and overwrites the checkpoint after every epoch. Throws when the manifest
/// was built from different dataset settings or the split has no cases.
TrainResult train_phase(const RunConfig& cfg, Mode mode, const std::string& phase, const DatasetManifest& manifest,
                        const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// Loaded networks for one mode, frozen for inference.
struct ModelSet {
  Mode mode = Mode::kObject;
  std::map<std::string, ParamStore> params;

  bool has(const std::string& phase) const { return params.count(phase) != 0; }
};

/// Loads the phases inference needs. Throws PipelineError("load", ...) for a
/// missing file and ConfigMismatchError for a checkpoint of another config.
ModelSet load_models(const RunConfig& cfg, Mode mode, const std::filesystem::path& dir, bool with_texture = true);

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct InferOptions {
  bool texture = true;
  std::uint64_t seed = 0;
};

struct PipelineOutput {
  Mode mode = Mode::kObject;
  TriangleMesh completed;
  bool completion_ran = true;
  Aabb tight_box;
  std::optional<RelBox> relative_box;
  std::optional<Aabb> predicted_box;
  std::optional<Skeleton25> skeleton;
  std::optional<TriangleMesh> prior_mesh;
  std::optional<TriangleMesh> raw_mesh;
  std::optional<TriangleMesh> fused_mesh;
  std::vector<std::pair<std::string, double>> timings;  // stage, seconds
  std::string config_hash;
};

/// Runs the pose/bbox, shape and texture phases on one partial scan given in
/// world coordinates. Throws PipelineError naming the failing stage.
PipelineOutput infer_pipeline(const TriangleMesh& partial, const RunConfig& cfg, const ModelSet& models,
                              const InferOptions& options = {});

/// Writes the final mesh to `output` and, next to it, "<stem>.prior.obj",
/// "<stem>.raw.obj", "<stem>.fused.obj" when present plus "<stem>.json".
void write_pipeline_artifacts(const PipelineOutput& out, const std::filesystem::path& output);

}  // namespace texrecon
