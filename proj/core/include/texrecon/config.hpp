// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "texrecon/encoder.hpp"
#include "texrecon/mesh.hpp"
#include "texrecon/priors.hpp"
#include "texrecon/synthetic.hpp"

namespace texrecon {

enum class Mode { kBody, kObject };
Mode mode_from_string(const std::string& s);
std::string to_string(Mode mode);

/// Class weights for the occupancy loss.
enum class BceWeighting {
  kInverseFrequency,  // w_pos = fraction of zero labels, w_neg = fraction of ones
  kLiteral,           // w_pos = fraction of ones, w_neg = fraction of zeros
  kUniform,           // w_pos = w_neg = 1 (plain BCE)
};
BceWeighting bce_weighting_from_string(const std::string& s);
std::string to_string(BceWeighting w);

inline const std::vector<std::string> kPhases{"pose", "bbox", "shape", "texture"};

struct PhaseConfig {
  std::string phase;
  int epochs = 40;
  double lr = 1e-4;
  std::size_t queries = 2048;
  std::vector<double> sigmas{0.015, 0.2};
  double normal_sigma_voxels = 1.0;
  BceWeighting bce = BceWeighting::kInverseFrequency;
  double joint_jitter = 0.01;
  int steps_per_case = 1;
  bool zero_init_decoder = false;
  /// bbox phase: also train on each complete mesh with an all-zero target.
  bool complete_copies = true;
  /// bbox phase: extra partial scans cut from each training object.
  int extra_partials = 0;
};

struct ModelConfig {
  int resolution = 64;
  EncoderConfig encoder;
  HeadConfig head;
  std::vector<std::size_t> decoder_hidden{256, 256, 256};
  std::size_t voxel_samples = 100000;
  /// Scene-space box every body is voxelized in.
  Aabb body_box{Vec3(-1.15, -0.2, -1.15), Vec3(1.15, 2.3, 1.15)};
  int prior_resolution = 64;
  CompletenessThresholds thresholds;
  double fusion_tau_voxels = 1.5;
};

/// Components that can be switched off for ablation runs.
struct Ablation {
  bool prior = true;       // body prior fusion
  bool bbox = true;        // predicted box for objects
  bool filter = true;      // completeness-based pass-through
  bool fusion = true;      // shape fusion with the partial scan
  bool balanced = true;    // balanced occupancy loss

  /// Parses a comma separated list of components to disable.
  static Ablation from_list(const std::string& list);
  std::string to_list() const;
};

/// Settings for a whole run. One configuration serves both modes; `mode` is
/// only the default the command line falls back to and is not hashed.
struct RunConfig {
  Mode mode = Mode::kObject;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs/default";
  DatasetConfig dataset;
  ModelConfig model;
  PhaseConfig train;
  std::map<std::string, PhaseConfig> phases = default_phases(PhaseConfig{});
  Ablation ablation;

  static std::map<std::string, PhaseConfig> default_phases(const PhaseConfig& base);

  /// Training settings for one phase: the shared defaults with that phase's
  /// overrides applied.
  const PhaseConfig& phase(const std::string& name) const;
  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
  /// FNV-1a over the canonical JSON of the settings that affect training:
  /// paths, mode, thresholds, fusion tau and the fusion/filter toggles are
  /// excluded.
  std::string hash() const;
  /// FNV-1a over the dataset section only; stored in the manifest.
  std::string dataset_hash() const;
  std::string to_json() const;

  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace texrecon
