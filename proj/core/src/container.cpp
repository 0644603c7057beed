// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace texrecon {
namespace {

constexpr char kMagic[8] = {'T', 'X', 'R', 'C', 'N', 'T', 'R', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

double get_f64(const std::string& in, std::size_t at) { return std::bit_cast<double>(get_u64(in, at)); }

}  // namespace

const Tensor* Container::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t.tensor;
  }
  return nullptr;
}

const Tensor& Container::at(const std::string& name) const {
  if (const auto* t = find(name)) return *t;
  throw std::out_of_range("container: no tensor named '" + name + "'");
}

std::string encode_container(const Container& c) {
  nlohmann::ordered_json header;
  header["format"] = "texrecon-container";
  header["version"] = 1;
  header["kind"] = c.kind;
  header["dtype"] = "float64";
  header["endianness"] = "little";
  header["attributes"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.attributes) header["attributes"][k] = v;
  header["tensors"] = nlohmann::ordered_json::array();
  std::uint64_t offset = 0;
  for (const auto& t : c.tensors) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["shape"] = t.tensor.shape();
    e["offset"] = offset;
    e["count"] = t.tensor.numel();
    header["tensors"].push_back(std::move(e));
    offset += 8 * t.tensor.numel();
  }
  const std::string hdr = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put_u64(out, hdr.size());
  out += hdr;
  out.reserve(out.size() + offset);
  for (const auto& t : c.tensors) {
    for (double d : t.tensor.data()) put_f64(out, d);
  }
  return out;
}

Container decode_container(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("container: bad magic");
  }
  const std::uint64_t hlen = get_u64(bytes, 8);
  if (16 + hlen > bytes.size()) throw std::runtime_error("container: truncated header");
  const auto header = nlohmann::json::parse(bytes.substr(16, hlen));
  if (header.at("format") != "texrecon-container" || header.at("dtype") != "float64") {
    throw std::runtime_error("container: unsupported format");
  }
  Container c;
  c.kind = header.at("kind").get<std::string>();
  for (const auto& [k, v] : header.at("attributes").items()) c.attributes[k] = v.get<std::string>();
  const std::size_t data_start = 16 + hlen;
  for (const auto& e : header.at("tensors")) {
    Shape shape = e.at("shape").get<Shape>();
    const auto count = e.at("count").get<std::uint64_t>();
    const auto offset = e.at("offset").get<std::uint64_t>();
    if (shape_numel(shape) != count) throw std::runtime_error("container: shape/count mismatch");
    if (data_start + offset + 8 * count > bytes.size()) throw std::runtime_error("container: truncated data");
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = get_f64(bytes, data_start + offset + 8 * i);
    c.tensors.push_back({e.at("name").get<std::string>(), Tensor(std::move(shape), std::move(values))});
  }
  return c;
}

void write_container(const std::filesystem::path& path, const Container& c) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("container: cannot open " + path.string() + " for writing");
  const std::string bytes = encode_container(c);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("container: write failed for " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("container: cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_container(ss.str());
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store, const CheckpointInfo& info) {
  Container c;
  c.kind = "checkpoint";
  c.attributes = info.attributes;
  c.attributes["phase"] = info.phase;
  c.attributes["config_hash"] = info.config_hash;
  c.attributes["adam_step"] = std::to_string(store.step());
  for (const auto& [name, s] : store.slots()) {
    c.tensors.push_back({"param/" + name, Tensor(s.value->shape(), s.value->storage())});
  }
  for (const auto& [name, s] : store.slots()) {
    c.tensors.push_back({"adam.m/" + name, Tensor(s.value->shape(), s.m)});
    c.tensors.push_back({"adam.v/" + name, Tensor(s.value->shape(), s.v)});
  }
  write_container(path, c);
}

ParamStore load_checkpoint(const std::filesystem::path& path, CheckpointInfo* info,
                           const std::optional<std::string>& expected_config_hash,
                           const std::optional<std::string>& expected_phase) {
  const Container c = read_container(path);
  if (c.kind != "checkpoint") throw std::runtime_error("checkpoint: " + path.string() + " holds a '" + c.kind + "'");
  const auto attr = [&](const std::string& k) {
    auto it = c.attributes.find(k);
    return it == c.attributes.end() ? std::string() : it->second;
  };
  if (expected_config_hash && attr("config_hash") != *expected_config_hash) {
    throw ConfigMismatchError("checkpoint " + path.string() + " was written with config hash " + attr("config_hash") +
                              ", expected " + *expected_config_hash);
  }
  if (expected_phase && attr("phase") != *expected_phase) {
    throw ConfigMismatchError("checkpoint " + path.string() + " is for phase '" + attr("phase") + "', expected '" +
                              *expected_phase + "'");
  }
  ParamStore store;
  for (const auto& t : c.tensors) {
    if (t.name.rfind("param/", 0) == 0) store.add(t.name.substr(6), t.tensor);
  }
  for (const auto& t : c.tensors) {
    for (const char* prefix : {"adam.m/", "adam.v/"}) {
      const std::string p(prefix);
      if (t.name.rfind(p, 0) != 0) continue;
      auto& slot = store.slot(t.name.substr(p.size()));
      (p == "adam.m/" ? slot.m : slot.v) = t.tensor.to_vector();
    }
  }
  store.set_step(std::stoll(attr("adam_step").empty() ? "0" : attr("adam_step")));
  if (info) {
    info->phase = attr("phase");
    info->config_hash = attr("config_hash");
    info->attributes = c.attributes;
    info->attributes.erase("phase");
    info->attributes.erase("config_hash");
    info->attributes.erase("adam_step");
  }
  return store;
}

}  // namespace texrecon
