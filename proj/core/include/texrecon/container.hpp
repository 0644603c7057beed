// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "texrecon/param_store.hpp"
#include "texrecon/tensor.hpp"

// Binary container shared by checkpoints and persisted grids.
//
// Layout:
//   bytes 0..7   magic "TXRCNTR1"
//   bytes 8..15  header length H, uint64 little endian
//   next H bytes JSON header:
//                {"format":"texrecon-container","version":1,"kind":...,
//                 "dtype":"float64","endianness":"little",
//                 "attributes":{string:string},
//                 "tensors":[{"name","shape","offset","count"}]}
//   remainder    raw float64 little-endian blocks; "offset" is in bytes from
//                the start of the data section.
namespace texrecon {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct Container {
  std::string kind;
  std::map<std::string, std::string> attributes;
  std::vector<NamedTensor> tensors;

  const Tensor& at(const std::string& name) const;
  const Tensor* find(const std::string& name) const;
};

std::string encode_container(const Container& c);
Container decode_container(const std::string& bytes);
void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

struct CheckpointInfo {
  std::string phase;
  std::string config_hash;
  std::map<std::string, std::string> attributes;
};

class ConfigMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store, const CheckpointInfo& info);

/// Loads parameters and Adam state. When `expected_config_hash` is given and
/// differs from the stored hash, throws ConfigMismatchError.
ParamStore load_checkpoint(const std::filesystem::path& path, CheckpointInfo* info = nullptr,
                           const std::optional<std::string>& expected_config_hash = std::nullopt,
                           const std::optional<std::string>& expected_phase = std::nullopt);

}  // namespace texrecon
