// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "texrecon/tensor.hpp"

namespace texrecon {

/// Named trainable parameters plus their Adam moments.
class ParamStore {
 public:
  struct Slot {
    TensorPtr value;
    std::vector<double> m;
    std::vector<double> v;
  };

  /// Registers a parameter. Throws if the name is taken.
  TensorPtr add(const std::string& name, Tensor value);
  /// Zero-mean uniform init with bound sqrt(6 / fan_in).
  TensorPtr add_he_uniform(const std::string& name, Shape shape, std::size_t fan_in, std::mt19937_64& rng);
  TensorPtr add_zeros(const std::string& name, Shape shape);

  bool contains(const std::string& name) const { return slots_.count(name) != 0; }
  const TensorPtr& get(const std::string& name) const;
  const Slot& slot(const std::string& name) const;
  Slot& slot(const std::string& name);
  const std::map<std::string, Slot>& slots() const { return slots_; }
  std::map<std::string, Slot>& slots() { return slots_; }

  std::int64_t step() const { return step_; }
  void set_step(std::int64_t t);
  std::size_t parameter_count() const;

  void zero_grad();
  /// Marks every parameter trainable or frozen. Frozen parameters are not
  /// recorded on a tape, which makes inference cheaper.
  void set_trainable(bool trainable);
  /// Deep copy of values and optimizer state; gradients are not copied.
  ParamStore clone() const;

 private:
  friend void adam_step(ParamStore&, double, double, double, double);
  std::map<std::string, Slot> slots_;
  std::int64_t step_ = 0;
};

/// One bias-corrected Adam update over every parameter, then zeroes the
/// gradients. A parameter without an accumulated gradient is an error.
void adam_step(ParamStore& store, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

}  // namespace texrecon
