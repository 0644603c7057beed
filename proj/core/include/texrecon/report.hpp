// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "texrecon/config.hpp"
#include "texrecon/synthetic.hpp"

namespace texrecon {

/// Metrics of one evaluated case under one pipeline variant ("arm").
struct EvalRow {
  std::string id;
  std::string kind;
  std::string arm;
  double chamfer = 0;
  std::optional<double> iou;
  std::optional<double> texture_mae;  // 0..255 units
  bool completion_ran = true;
};

struct ArmSummary {
  std::string arm;
  std::size_t cases = 0;
  double chamfer = 0;
  std::optional<double> iou;          // mean over cases that have it
  std::optional<double> texture_mae;  // mean over cases that have it
};

/// Per-arm means in first-appearance order. Throws on an empty row set.
std::vector<ArmSummary> summarize(const std::vector<EvalRow>& rows);

/// CSV with one row per case and arm followed by one "mean" row per arm.
/// The first line is a "# config_hash=<hash>" comment.
std::string report_csv(const std::vector<EvalRow>& rows, const std::string& config_hash);
/// Parses the per-case rows back; mean rows and the comment are skipped.
std::vector<EvalRow> parse_report_csv(const std::string& text, std::string* config_hash = nullptr);
/// Fixed-width table of the per-arm means.
std::string report_summary(const std::vector<EvalRow>& rows);

/// One pipeline variant to evaluate: its configuration (ablation toggles
/// included) and the directory holding its checkpoints.
struct EvalArm {
  std::string name;
  RunConfig config;
  std::filesystem::path models_dir;
};

struct EvalOptions {
  std::size_t metric_samples = 20000;
  std::uint64_t seed = 0;
  bool texture = true;
  bool iou = true;  // only when both meshes are watertight
};

/// Runs every arm on every manifest entry of `split` and scores the output
/// against the ground truth. Models are loaded once per arm and mode.
std::vector<EvalRow> evaluate_split(const DatasetManifest& manifest, const std::string& split,
                                    const std::vector<EvalArm>& arms, const EvalOptions& options = {},
                                    std::ostream* log = nullptr);

}  // namespace texrecon
