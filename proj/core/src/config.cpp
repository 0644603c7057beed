// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "texrecon/hash.hpp"

namespace texrecon {

using Json = nlohmann::ordered_json;

Mode mode_from_string(const std::string& s) {
  if (s == "body") return Mode::kBody;
  if (s == "object") return Mode::kObject;
  throw std::invalid_argument("unknown mode '" + s + "' (expected body or object)");
}

std::string to_string(Mode mode) { return mode == Mode::kBody ? "body" : "object"; }

BceWeighting bce_weighting_from_string(const std::string& s) {
  if (s == "inverse") return BceWeighting::kInverseFrequency;
  if (s == "literal") return BceWeighting::kLiteral;
  if (s == "uniform") return BceWeighting::kUniform;
  throw std::invalid_argument("unknown bce weighting '" + s + "' (expected inverse, literal or uniform)");
}

std::string to_string(BceWeighting w) {
  switch (w) {
    case BceWeighting::kInverseFrequency: return "inverse";
    case BceWeighting::kLiteral: return "literal";
    case BceWeighting::kUniform: return "uniform";
  }
  return "inverse";
}

Ablation Ablation::from_list(const std::string& list) {
  Ablation a;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "prior") a.prior = false;
    else if (item == "bbox") a.bbox = false;
    else if (item == "filter") a.filter = false;
    else if (item == "fusion") a.fusion = false;
    else if (item == "balanced") a.balanced = false;
    else throw std::invalid_argument("unknown ablation '" + item + "' (expected prior, bbox, filter, fusion, balanced)");
  }
  return a;
}

std::string Ablation::to_list() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(prior, "prior");
  add(bbox, "bbox");
  add(filter, "filter");
  add(fusion, "fusion");
  add(balanced, "balanced");
  return out;
}

namespace {

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw std::invalid_argument("config: unknown key '" + where + "." + it.key() + "'");
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Json box_json(const Aabb& b) { return Json::array({b.min.x(), b.min.y(), b.min.z(), b.max.x(), b.max.y(), b.max.z()}); }

Aabb box_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 6) throw std::invalid_argument("config: box needs 6 numbers");
  return {Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
}

Json phase_json(const PhaseConfig& p) {
  Json j;
  j["epochs"] = p.epochs;
  j["lr"] = p.lr;
  j["queries"] = p.queries;
  j["sigmas"] = p.sigmas;
  j["normal_sigma_voxels"] = p.normal_sigma_voxels;
  j["bce"] = to_string(p.bce);
  j["joint_jitter"] = p.joint_jitter;
  j["steps_per_case"] = p.steps_per_case;
  j["zero_init_decoder"] = p.zero_init_decoder;
  j["complete_copies"] = p.complete_copies;
  j["extra_partials"] = p.extra_partials;
  return j;
}

void phase_from_json(const Json& j, const std::string& where, PhaseConfig& p) {
  check_keys(j, where,
             {"epochs", "lr", "queries", "sigmas", "normal_sigma_voxels", "bce", "joint_jitter", "steps_per_case",
              "zero_init_decoder", "complete_copies", "extra_partials"});
  read(j, "epochs", p.epochs);
  read(j, "lr", p.lr);
  read(j, "queries", p.queries);
  read(j, "sigmas", p.sigmas);
  read(j, "normal_sigma_voxels", p.normal_sigma_voxels);
  if (j.contains("bce")) p.bce = bce_weighting_from_string(j.at("bce").get<std::string>());
  read(j, "joint_jitter", p.joint_jitter);
  read(j, "steps_per_case", p.steps_per_case);
  read(j, "zero_init_decoder", p.zero_init_decoder);
  read(j, "complete_copies", p.complete_copies);
  read(j, "extra_partials", p.extra_partials);
}

Json dataset_json(const DatasetConfig& d) {
  Json j;
  j["dir"] = d.output_dir.generic_string();
  j["bodies"] = d.bodies;
  j["objects"] = d.objects;
  j["seed"] = d.seed;
  j["splits"] = d.splits;
  j["partial_mode"] = to_string(d.partial_mode);
  j["min_removed"] = d.partial.min_removed;
  j["max_removed"] = d.partial.max_removed;
  j["max_retries"] = d.partial.max_retries;
  j["pose_amplitude"] = d.pose_amplitude;
  j["min_scale"] = d.min_scale;
  j["max_scale"] = d.max_scale;
  j["body_resolution"] = d.body_resolution;
  j["object_resolution"] = d.object_resolution;
  return j;
}

Json model_json(const ModelConfig& m) {
  Json j;
  j["resolution"] = m.resolution;
  j["encoder"] = {{"scales", m.encoder.scales},   {"channels", m.encoder.channels},
                  {"kernel", m.encoder.kernel},   {"pe_bands", m.encoder.pe_bands},
                  {"norm_eps", m.encoder.norm_eps}};
  j["head_hidden"] = m.head.hidden;
  j["decoder_hidden"] = m.decoder_hidden;
  j["voxel_samples"] = m.voxel_samples;
  j["body_box"] = box_json(m.body_box);
  j["prior_resolution"] = m.prior_resolution;
  j["thresholds"] = {{"t1", m.thresholds.t1}, {"t2", m.thresholds.t2}};
  j["fusion_tau_voxels"] = m.fusion_tau_voxels;
  return j;
}

Json full_json(const RunConfig& c, bool with_paths) {
  Json j;
  if (with_paths) j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  if (with_paths) j["output_dir"] = c.output_dir.generic_string();
  Json d = dataset_json(c.dataset);
  if (!with_paths) d.erase("dir");
  j["dataset"] = d;
  j["model"] = model_json(c.model);
  j["train"] = phase_json(c.train);
  Json phases = Json::object();
  for (const auto& [name, p] : c.phases) phases[name] = phase_json(p);
  j["phases"] = phases;
  j["ablate"] = c.ablation.to_list();
  return j;
}

// Settings that change trained parameters. Inference-only knobs (fusion,
// filter, thresholds, tau) are left out so they can vary per run.
Json training_json(const RunConfig& c) {
  Json j = full_json(c, false);
  j["model"].erase("thresholds");
  j["model"].erase("fusion_tau_voxels");
  Ablation a = c.ablation;
  a.fusion = true;
  a.filter = true;
  j["ablate"] = a.to_list();
  return j;
}

}  // namespace

std::map<std::string, PhaseConfig> RunConfig::default_phases(const PhaseConfig& base) {
  std::map<std::string, PhaseConfig> out;
  for (const auto& name : kPhases) {
    out[name] = base;
    out[name].phase = name;
  }
  return out;
}

const PhaseConfig& RunConfig::phase(const std::string& name) const {
  auto it = phases.find(name);
  if (it == phases.end()) throw std::invalid_argument("config: unknown phase '" + name + "'");
  return it->second;
}

void RunConfig::validate() const {
  if (model.resolution < 2) throw std::invalid_argument("config: model.resolution must be >= 2");
  model.encoder.validate(model.resolution);
  if (model.voxel_samples == 0) throw std::invalid_argument("config: model.voxel_samples must be >= 1");
  if (model.body_box.degenerate()) throw std::invalid_argument("config: model.body_box is degenerate");
  if (model.prior_resolution < 8) throw std::invalid_argument("config: model.prior_resolution must be >= 8");
  if (!(model.fusion_tau_voxels >= 0)) throw std::invalid_argument("config: model.fusion_tau_voxels must be >= 0");
  if (model.decoder_hidden.empty()) throw std::invalid_argument("config: model.decoder_hidden must not be empty");
  for (const auto& [name, p] : phases) {
    if (p.epochs < 1) throw std::invalid_argument("config: phase " + name + ": epochs must be >= 1");
    if (!(p.lr > 0)) throw std::invalid_argument("config: phase " + name + ": lr must be > 0");
    if (p.queries == 0) throw std::invalid_argument("config: phase " + name + ": queries must be >= 1");
    if (p.sigmas.empty()) throw std::invalid_argument("config: phase " + name + ": sigmas must not be empty");
    for (double s : p.sigmas) {
      if (!(s > 0)) throw std::invalid_argument("config: phase " + name + ": sigmas must be > 0");
    }
    if (p.steps_per_case < 1) throw std::invalid_argument("config: phase " + name + ": steps_per_case must be >= 1");
    if (p.extra_partials < 0) throw std::invalid_argument("config: phase " + name + ": extra_partials must be >= 0");
    if (p.joint_jitter < 0) throw std::invalid_argument("config: phase " + name + ": joint_jitter must be >= 0");
  }
  if (dataset.bodies < 0 || dataset.objects < 0) throw std::invalid_argument("config: dataset counts must be >= 0");
}

std::string RunConfig::hash() const { return hex64(fnv1a64(training_json(*this).dump())); }

std::string RunConfig::dataset_hash() const {
  Json d = dataset_json(dataset);
  d.erase("dir");
  return hex64(fnv1a64(d.dump()));
}

std::string RunConfig::to_json() const { return full_json(*this, true).dump(2); }

RunConfig RunConfig::from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j, "", {"mode", "seed", "output_dir", "dataset", "model", "train", "phases", "ablate"});
    if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
    read(j, "seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("dataset")) {
      const Json& d = j.at("dataset");
      check_keys(d, "dataset",
                 {"dir", "bodies", "objects", "seed", "splits", "partial_mode", "min_removed", "max_removed",
                  "max_retries", "pose_amplitude", "min_scale", "max_scale", "body_resolution", "object_resolution"});
      auto& ds = c.dataset;
      if (d.contains("dir")) ds.output_dir = d.at("dir").get<std::string>();
      read(d, "bodies", ds.bodies);
      read(d, "objects", ds.objects);
      read(d, "seed", ds.seed);
      read(d, "splits", ds.splits);
      if (d.contains("partial_mode")) ds.partial_mode = partial_mode_from_string(d.at("partial_mode").get<std::string>());
      read(d, "min_removed", ds.partial.min_removed);
      read(d, "max_removed", ds.partial.max_removed);
      read(d, "max_retries", ds.partial.max_retries);
      read(d, "pose_amplitude", ds.pose_amplitude);
      read(d, "min_scale", ds.min_scale);
      read(d, "max_scale", ds.max_scale);
      read(d, "body_resolution", ds.body_resolution);
      read(d, "object_resolution", ds.object_resolution);
    }
    if (j.contains("model")) {
      const Json& m = j.at("model");
      check_keys(m, "model",
                 {"resolution", "encoder", "head_hidden", "decoder_hidden", "voxel_samples", "body_box",
                  "prior_resolution", "thresholds", "fusion_tau_voxels"});
      auto& mc = c.model;
      read(m, "resolution", mc.resolution);
      if (m.contains("encoder")) {
        const Json& e = m.at("encoder");
        check_keys(e, "model.encoder", {"scales", "channels", "kernel", "pe_bands", "norm_eps"});
        read(e, "scales", mc.encoder.scales);
        read(e, "channels", mc.encoder.channels);
        read(e, "kernel", mc.encoder.kernel);
        read(e, "pe_bands", mc.encoder.pe_bands);
        read(e, "norm_eps", mc.encoder.norm_eps);
      }
      read(m, "head_hidden", mc.head.hidden);
      read(m, "decoder_hidden", mc.decoder_hidden);
      read(m, "voxel_samples", mc.voxel_samples);
      if (m.contains("body_box")) mc.body_box = box_from_json(m.at("body_box"));
      read(m, "prior_resolution", mc.prior_resolution);
      if (m.contains("thresholds")) {
        const Json& t = m.at("thresholds");
        check_keys(t, "model.thresholds", {"t1", "t2"});
        read(t, "t1", mc.thresholds.t1);
        read(t, "t2", mc.thresholds.t2);
      }
      read(m, "fusion_tau_voxels", mc.fusion_tau_voxels);
    }
    if (j.contains("train")) phase_from_json(j.at("train"), "train", c.train);
    c.phases = default_phases(c.train);
    if (j.contains("phases")) {
      const Json& ph = j.at("phases");
      check_keys(ph, "phases", {"pose", "bbox", "shape", "texture"});
      for (auto it = ph.begin(); it != ph.end(); ++it) {
        phase_from_json(it.value(), "phases." + it.key(), c.phases[it.key()]);
      }
    }
    if (j.contains("ablate")) c.ablation = Ablation::from_list(j.at("ablate").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace texrecon
