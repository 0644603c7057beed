// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace texrecon {

using Shape = std::vector<std::size_t>;

/// Allocator returning 64-byte aligned blocks.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

/// Aligned float64 buffer backing tensor values and gradients.
using Buffer = std::vector<double, AlignedAllocator<double>>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense row-major float64 array with an optional gradient buffer.
///
/// Values are written by the op that creates the tensor and are not
/// mutated afterwards (parameters excepted: the optimizer updates them
/// in place between steps). The gradient buffer is allocated lazily the
/// first time something accumulates into it.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
  Tensor(Shape shape, std::span<const double> values, bool requires_grad = false);
  Tensor(Shape shape, const std::vector<double>& values, bool requires_grad = false)
      : Tensor(std::move(shape), std::span<const double>(values), requires_grad) {}

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t numel() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  Buffer& storage() { return data_; }
  const Buffer& storage() const { return data_; }
  std::vector<double> to_vector() const { return {data_.begin(), data_.end()}; }

  double item() const;

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool value) { requires_grad_ = value; }

  bool has_grad() const { return !grad_.empty(); }
  /// Gradient view; allocates a zero buffer on first access.
  std::span<double> grad_mut();
  /// Gradient view; empty when no gradient has been accumulated.
  std::span<const double> grad() const { return grad_; }
  void zero_grad();
  void clear_grad() { grad_.clear(); grad_.shrink_to_fit(); }

 private:
  Shape shape_;
  Buffer data_;
  Buffer grad_;
  bool requires_grad_ = false;
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
TensorPtr make_tensor(Shape shape, std::span<const double> values, bool requires_grad = false);
inline TensorPtr make_tensor(Shape shape, const std::vector<double>& values, bool requires_grad = false) {
  return make_tensor(std::move(shape), std::span<const double>(values), requires_grad);
}

/// Ordered record of the differentiable ops executed during one forward pass.
///
/// Ops append themselves in execution order, which is a topological order of
/// the graph. `backward` walks the record once in reverse.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  void record(TensorPtr output, BackwardFn fn);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool consumed() const { return consumed_; }
  void clear();

 private:
  friend void backward(const TensorPtr& loss, Tape& tape);

  struct Entry {
    TensorPtr output;
    BackwardFn fn;
  };
  std::vector<Entry> entries_;
  bool consumed_ = false;
};

/// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every tensor
/// reachable from `loss` that requires them. Gradients add onto whatever
/// is already stored; the optimizer clears parameter gradients.
void backward(const TensorPtr& loss, Tape& tape);

}  // namespace texrecon
