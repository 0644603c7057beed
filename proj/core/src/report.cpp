// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/report.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "texrecon/metrics.hpp"
#include "texrecon/pipeline.hpp"

namespace texrecon {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

constexpr const char* kHeader = "id,kind,arm,chamfer,iou,texture_mae,completion_ran";

}  // namespace

std::vector<ArmSummary> summarize(const std::vector<EvalRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("report: no evaluated cases");
  std::vector<ArmSummary> out;
  std::map<std::string, std::size_t> index;
  struct Acc {
    double iou = 0, mae = 0;
    std::size_t n_iou = 0, n_mae = 0;
  };
  std::vector<Acc> acc;
  for (const auto& r : rows) {
    auto [it, fresh] = index.emplace(r.arm, out.size());
    if (fresh) {
      out.push_back({r.arm});
      acc.emplace_back();
    }
    ArmSummary& s = out[it->second];
    Acc& a = acc[it->second];
    s.cases += 1;
    s.chamfer += r.chamfer;
    if (r.iou) {
      a.iou += *r.iou;
      a.n_iou += 1;
    }
    if (r.texture_mae) {
      a.mae += *r.texture_mae;
      a.n_mae += 1;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].chamfer /= static_cast<double>(out[i].cases);
    if (acc[i].n_iou) out[i].iou = acc[i].iou / static_cast<double>(acc[i].n_iou);
    if (acc[i].n_mae) out[i].texture_mae = acc[i].mae / static_cast<double>(acc[i].n_mae);
  }
  return out;
}

std::string report_csv(const std::vector<EvalRow>& rows, const std::string& config_hash) {
  const auto summary = summarize(rows);
  std::ostringstream os;
  os << "# config_hash=" << config_hash << '\n' << kHeader << '\n';
  for (const auto& r : rows) {
    os << r.id << ',' << r.kind << ',' << r.arm << ',' << num(r.chamfer) << ',' << opt(r.iou) << ','
       << opt(r.texture_mae) << ',' << (r.completion_ran ? 1 : 0) << '\n';
  }
  for (const auto& s : summary) {
    os << "mean,all," << s.arm << ',' << num(s.chamfer) << ',' << opt(s.iou) << ',' << opt(s.texture_mae) << ",\n";
  }
  return os.str();
}

std::vector<EvalRow> parse_report_csv(const std::string& text, std::string* config_hash) {
  std::stringstream ss(text);
  std::string line;
  std::vector<EvalRow> rows;
  bool header = false;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash=";
      if (config_hash && line.rfind(key, 0) == 0) *config_hash = line.substr(key.size());
      continue;
    }
    if (!header) {
      if (line != kHeader) throw std::invalid_argument("report: line " + std::to_string(lineno) + ": bad header");
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 7) {
      throw std::invalid_argument("report: line " + std::to_string(lineno) + ": expected 7 columns");
    }
    if (cells[0] == "mean" && cells[1] == "all") continue;
    try {
      EvalRow r;
      r.id = cells[0];
      r.kind = cells[1];
      r.arm = cells[2];
      r.chamfer = std::stod(cells[3]);
      r.iou = parse_opt(cells[4]);
      r.texture_mae = parse_opt(cells[5]);
      r.completion_ran = cells[6] == "1";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("report: line " + std::to_string(lineno) + ": bad number");
    }
  }
  if (!header) throw std::invalid_argument("report: missing header");
  return rows;
}

std::string report_summary(const std::vector<EvalRow>& rows) {
  const auto summary = summarize(rows);
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-20s %6s %12s %8s %12s\n", "arm", "cases", "chamfer", "iou", "texture_mae");
  os << buf;
  for (const auto& s : summary) {
    const std::string iou = s.iou ? num(*s.iou).substr(0, 6) : "-";
    const std::string mae = s.texture_mae ? num(*s.texture_mae).substr(0, 8) : "-";
    std::snprintf(buf, sizeof buf, "%-20s %6zu %12.6f %8s %12s\n", s.arm.c_str(), s.cases, s.chamfer, iou.c_str(),
                  mae.c_str());
    os << buf;
  }
  return os.str();
}

std::vector<EvalRow> evaluate_split(const DatasetManifest& manifest, const std::string& split,
                                    const std::vector<EvalArm>& arms, const EvalOptions& options, std::ostream* log) {
  const auto entries = manifest.split(split);
  if (entries.empty()) throw std::invalid_argument("eval: split '" + split + "' has no cases");
  if (arms.empty()) throw std::invalid_argument("eval: no arms to evaluate");
  std::vector<EvalRow> rows;
  for (const auto& arm : arms) {
    std::map<Mode, ModelSet> models;
    for (const ManifestEntry* e : entries) {
      const Mode mode = mode_from_string(e->kind);
      auto it = models.find(mode);
      if (it == models.end()) it = models.emplace(mode, load_models(arm.config, mode, arm.models_dir, options.texture)).first;
      const TriangleMesh partial = load_mesh(manifest.resolve(e->partial_path));
      const TriangleMesh gt = load_mesh(manifest.resolve(e->gt_path));
      InferOptions io;
      io.texture = options.texture;
      io.seed = arm.config.seed;
      const PipelineOutput out = infer_pipeline(partial, arm.config, it->second, io);
      const bool iou = options.iou && is_watertight(out.completed) && is_watertight(gt);
      const MeshMetrics m = eval_metrics(out.completed, gt, options.metric_samples, options.seed, iou);
      EvalRow r;
      r.id = e->id;
      r.kind = e->kind;
      r.arm = arm.name;
      r.chamfer = m.chamfer;
      r.iou = m.volumetric_iou;
      if (options.texture) r.texture_mae = m.texture_mae;
      r.completion_ran = out.completion_ran;
      rows.push_back(r);
      if (log) *log << arm.name << ' ' << e->id << " chamfer " << m.chamfer << '\n';
    }
  }
  return rows;
}

}  // namespace texrecon
