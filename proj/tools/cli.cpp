// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "logging.hpp"
#include "texrecon/container.hpp"
#include "texrecon/grad_suite.hpp"
#include "texrecon/pipeline.hpp"
#include "texrecon/report.hpp"

namespace texrecon::cli {

LogLevel log_level_from_env() {
  const char* v = std::getenv("TEXRECON_LOG");
  if (!v || !*v) return LogLevel::kInfo;
  const std::string s(v);
  if (s == "quiet") return LogLevel::kQuiet;
  if (s == "error") return LogLevel::kError;
  if (s == "info") return LogLevel::kInfo;
  if (s == "debug") return LogLevel::kDebug;
  throw std::invalid_argument("TEXRECON_LOG must be quiet, error, info or debug, got '" + s + "'");
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::optional<std::string> ablate;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_mode) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Override the run and dataset seeds");
  if (with_mode) cmd->add_option("--mode", o.mode, "body or object (default: the config's mode)");
  cmd->add_option("--ablate", o.ablate, "Comma-separated components to disable: prior,bbox,filter,fusion,balanced");
}

RunConfig load_config(const CommonOptions& o) {
  RunConfig cfg;
  try {
    cfg = RunConfig::load(o.config);
    if (o.seed) {
      cfg.seed = *o.seed;
      cfg.dataset.seed = *o.seed;
    }
    if (!o.mode.empty()) cfg.mode = mode_from_string(o.mode);
    if (o.ablate) cfg.ablation = Ablation::from_list(*o.ablate);
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::filesystem::path manifest_path(const RunConfig& cfg) { return cfg.dataset.output_dir / "manifest.jsonl"; }

int cmd_gen_data(const CommonOptions& o, std::ostream& out, Logger& log) {
  const RunConfig cfg = load_config(o);
  DatasetConfig d = cfg.dataset;
  d.config_hash = cfg.dataset_hash();
  log.info("generating " + std::to_string(d.bodies) + " bodies and " + std::to_string(d.objects) + " objects into " +
           d.output_dir.string());
  const DatasetManifest m = build_dataset(d);
  out << manifest_path(cfg).string() << '\n';
  log.info("wrote " + std::to_string(m.entries.size()) + " entries");
  return kExitOk;
}

int cmd_train(const CommonOptions& o, const std::string& phase, std::ostream& out, Logger& log) {
  const RunConfig cfg = load_config(o);
  const Mode mode = cfg.mode;
  std::vector<std::string> phases;
  if (phase == "all") {
    phases = required_phases(cfg, mode, true);
  } else {
    if (std::find(kPhases.begin(), kPhases.end(), phase) == kPhases.end()) {
      throw UsageError("--phase must be pose, bbox, shape, texture or all");
    }
    if (!phase_applies(mode, phase)) throw UsageError("phase " + phase + " does not apply to " + to_string(mode));
    phases = {phase};
  }
  const DatasetManifest manifest = read_manifest(manifest_path(cfg));
  const auto dir = models_dir(cfg);
  for (const auto& p : phases) {
    log.info("training " + to_string(mode) + "-" + p);
    const TrainResult r = train_phase(cfg, mode, p, manifest, dir, log.info_stream());
    out << r.checkpoint.string() << '\n';
  }
  return kExitOk;
}

int cmd_infer(const CommonOptions& o, const std::string& input, const std::string& output, bool no_texture,
              std::ostream& out, Logger& log) {
  const RunConfig cfg = load_config(o);
  const TriangleMesh partial = load_mesh(input);
  const ModelSet models = load_models(cfg, cfg.mode, models_dir(cfg), !no_texture);
  InferOptions io;
  io.texture = !no_texture;
  io.seed = cfg.seed;
  const PipelineOutput result = infer_pipeline(partial, cfg, models, io);
  write_pipeline_artifacts(result, output);
  for (const auto& [stage, seconds] : result.timings) log.debug(stage + " took " + std::to_string(seconds) + " s");
  out << output << (result.completion_ran ? " completed" : " passed through (scan judged complete)") << '\n';
  return kExitOk;
}

int cmd_eval(const CommonOptions& o, const std::string& split, const std::string& output,
             const std::vector<std::string>& compare, bool no_texture, std::ostream& out, Logger& log) {
  const RunConfig cfg = load_config(o);
  const DatasetManifest manifest = read_manifest(manifest_path(cfg));
  std::vector<EvalArm> arms;
  const std::string base = cfg.ablation.to_list();
  arms.push_back({base.empty() ? "full" : "no-" + base, cfg, models_dir(cfg)});
  for (const auto& c : compare) {
    RunConfig variant = cfg;
    try {
      const Ablation extra = Ablation::from_list(c);
      variant.ablation.prior = variant.ablation.prior && extra.prior;
      variant.ablation.bbox = variant.ablation.bbox && extra.bbox;
      variant.ablation.filter = variant.ablation.filter && extra.filter;
      variant.ablation.fusion = variant.ablation.fusion && extra.fusion;
      variant.ablation.balanced = variant.ablation.balanced && extra.balanced;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    arms.push_back({"no-" + variant.ablation.to_list(), variant, models_dir(variant)});
  }
  EvalOptions eo;
  eo.seed = cfg.seed;
  eo.texture = !no_texture;
  const auto rows = evaluate_split(manifest, split, arms, eo, log.enabled(LogLevel::kDebug) ? log.info_stream() : nullptr);
  const std::filesystem::path csv = output.empty() ? cfg.output_dir / ("report-" + split + ".csv") : std::filesystem::path(output);
  if (!csv.parent_path().empty()) std::filesystem::create_directories(csv.parent_path());
  std::ofstream f(csv, std::ios::binary);
  f << report_csv(rows, cfg.hash());
  if (!f) throw std::runtime_error("cannot write " + csv.string());
  out << report_summary(rows);
  log.info("report written to " + csv.string());
  return kExitOk;
}

int cmd_grad_check(std::uint64_t seed, std::ostream& out) {
  const auto results = run_grad_suite(seed);
  bool ok = true;
  char buf[128];
  for (const auto& r : results) {
    const bool pass = r.max_rel_error < 1e-4;
    ok = ok && pass;
    std::snprintf(buf, sizeof buf, "%-40s %.3e %s\n", r.name.c_str(), r.max_rel_error, pass ? "ok" : "FAIL");
    out << buf;
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  LogLevel level;
  try {
    level = log_level_from_env();
  } catch (const std::invalid_argument& e) {
    err << "texrecon: " << e.what() << '\n';
    return kExitUsage;
  }
  Logger log(err, level);

  CLI::App app{"Textured shape completion from partial scans", "texrecon"};
  app.require_subcommand(1);
  app.fallthrough(false);

  CommonOptions gen, train, infer, eval;
  auto* c_gen = app.add_subcommand("gen-data", "Generate the synthetic dataset and manifest");
  add_common(c_gen, gen, false);

  std::string phase;
  auto* c_train = app.add_subcommand("train", "Train one phase (or all phases) for a mode");
  add_common(c_train, train, true);
  c_train->add_option("--phase", phase, "pose, bbox, shape, texture or all")->required();

  std::string input, output;
  bool infer_no_texture = false;
  auto* c_infer = app.add_subcommand("infer", "Complete one partial scan");
  add_common(c_infer, infer, true);
  c_infer->add_option("--input", input, "Partial mesh (OBJ or PLY)")->required();
  c_infer->add_option("--output", output, "Completed mesh path")->required();
  c_infer->add_flag("--no-texture", infer_no_texture, "Skip the texture phase");

  std::string split = "test", report_path;
  std::vector<std::string> compare;
  bool eval_no_texture = false;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a dataset split and write a report");
  add_common(c_eval, eval, false);
  c_eval->add_option("--split", split, "train, val or test");
  c_eval->add_option("--output", report_path, "Report CSV path");
  c_eval->add_option("--compare", compare, "Extra arms, each a comma-separated ablation list")->delimiter(';');
  c_eval->add_flag("--no-texture", eval_no_texture, "Skip the texture phase");

  std::uint64_t grad_seed = 0;
  auto* c_grad = app.add_subcommand("grad-check", "Run the finite-difference gradient suite");
  c_grad->add_option("--seed", grad_seed, "Random input seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "texrecon: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (c_gen->parsed()) return cmd_gen_data(gen, out, log);
    if (c_train->parsed()) return cmd_train(train, phase, out, log);
    if (c_infer->parsed()) return cmd_infer(infer, input, output, infer_no_texture, out, log);
    if (c_eval->parsed()) return cmd_eval(eval, split, report_path, compare, eval_no_texture, out, log);
    if (c_grad->parsed()) return cmd_grad_check(grad_seed, out);
  } catch (const UsageError& e) {
    err << "texrecon: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    log.error(e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace texrecon::cli
