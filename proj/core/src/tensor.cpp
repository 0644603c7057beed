// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace texrecon {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill, bool requires_grad)
    : shape_(std::move(shape)), data_(shape_numel(shape_), fill), requires_grad_(requires_grad) {}

Tensor::Tensor(Shape shape, std::span<const double> values, bool requires_grad)
    : shape_(std::move(shape)), data_(values.begin(), values.end()), requires_grad_(requires_grad) {
  if (shape_numel(shape_) != data_.size()) {
    throw std::invalid_argument("tensor: shape " + shape_to_string(shape_) + " does not match " +
                                std::to_string(data_.size()) + " values");
  }
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw std::invalid_argument("tensor: item() on tensor of shape " + shape_to_string(shape_));
  }
  return data_[0];
}

std::span<double> Tensor::grad_mut() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() {
  if (!grad_.empty()) std::fill(grad_.begin(), grad_.end(), 0.0);
}

TensorPtr make_tensor(Shape shape, double fill, bool requires_grad) {
  return std::make_shared<Tensor>(std::move(shape), fill, requires_grad);
}

TensorPtr make_tensor(Shape shape, std::span<const double> values, bool requires_grad) {
  return std::make_shared<Tensor>(std::move(shape), values, requires_grad);
}

void Tape::record(TensorPtr output, BackwardFn fn) {
  if (consumed_) throw std::logic_error("tape: cannot record onto a tape that already ran backward");
  output->set_requires_grad(true);
  entries_.push_back({std::move(output), std::move(fn)});
}

void Tape::clear() {
  entries_.clear();
  consumed_ = false;
}

void backward(const TensorPtr& loss, Tape& tape) {
  if (!loss || loss->numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                (loss ? shape_to_string(loss->shape()) : std::string("<null>")));
  }
  if (tape.empty()) throw std::invalid_argument("backward: tape is empty");
  if (tape.consumed_) throw std::logic_error("backward: tape already consumed");
  if (!loss->requires_grad()) throw std::invalid_argument("backward: loss does not depend on any trainable tensor");
  tape.consumed_ = true;
  loss->grad_mut()[0] += 1.0;
  for (auto it = tape.entries_.rbegin(); it != tape.entries_.rend(); ++it) {
    if (it->output->grad().empty()) continue;
    it->fn();
  }
}

}  // namespace texrecon
