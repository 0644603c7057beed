// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "texrecon/tensor.hpp"

namespace texrecon {

using ForwardFn = std::function<TensorPtr(Tape&)>;

/// Compares reverse-mode gradients of a scalar forward function against
/// central differences, perturbing every coordinate of every input.
///
/// Returns max |analytic - numeric| / max(1, |analytic|). The inputs are left
/// holding the analytic gradient and their original values.
double grad_check(const ForwardFn& forward, const std::vector<TensorPtr>& inputs, double step = 1e-5);

}  // namespace texrecon
