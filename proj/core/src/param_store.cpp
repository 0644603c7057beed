// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/param_store.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace texrecon {

TensorPtr ParamStore::add(const std::string& name, Tensor value) {
  if (slots_.count(name)) throw std::invalid_argument("param store: duplicate parameter '" + name + "'");
  value.set_requires_grad(true);
  const std::size_t n = value.numel();
  auto& s = slots_[name];
  s.value = std::make_shared<Tensor>(std::move(value));
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  return s.value;
}

TensorPtr ParamStore::add_he_uniform(const std::string& name, Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (auto& x : t.data()) x = dist(rng);
  return add(name, std::move(t));
}

TensorPtr ParamStore::add_zeros(const std::string& name, Shape shape) { return add(name, Tensor(std::move(shape))); }

const TensorPtr& ParamStore::get(const std::string& name) const { return slot(name).value; }

const ParamStore::Slot& ParamStore::slot(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::out_of_range("param store: no parameter '" + name + "'");
  return it->second;
}

ParamStore::Slot& ParamStore::slot(const std::string& name) {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::out_of_range("param store: no parameter '" + name + "'");
  return it->second;
}

void ParamStore::set_step(std::int64_t t) {
  if (t < 0) throw std::invalid_argument("param store: step must be >= 0");
  step_ = t;
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, s] : slots_) n += s.value->numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, s] : slots_) s.value->zero_grad();
}

void ParamStore::set_trainable(bool trainable) {
  for (auto& [name, s] : slots_) s.value->set_requires_grad(trainable);
}

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& [name, s] : slots_) {
    Slot c;
    c.value = std::make_shared<Tensor>(s.value->shape(), s.value->storage(), s.value->requires_grad());
    c.m = s.m;
    c.v = s.v;
    out.slots_.emplace(name, std::move(c));
  }
  out.step_ = step_;
  return out;
}

void adam_step(ParamStore& store, double lr, double beta1, double beta2, double eps) {
  for (const auto& [name, s] : store.slots_) {
    if (s.value->requires_grad() && !s.value->has_grad()) {
      throw std::logic_error("adam_step: parameter '" + name + "' has no gradient");
    }
  }
  store.step_ += 1;
  const double t = static_cast<double>(store.step_);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  for (auto& [name, s] : store.slots_) {
    if (!s.value->requires_grad()) continue;
    auto x = s.value->data();
    auto g = s.value->grad_mut();
    for (std::size_t i = 0; i < x.size(); ++i) {
      s.m[i] = beta1 * s.m[i] + (1.0 - beta1) * g[i];
      s.v[i] = beta2 * s.v[i] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = s.m[i] / c1;
      const double vhat = s.v[i] / c2;
      x[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      g[i] = 0.0;
    }
  }
}

}  // namespace texrecon
