// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace texrecon {

struct GradCheckResult {
  std::string name;
  double max_rel_error = 0;
};

/// Finite-difference checks (central differences, step 1e-5) of every
/// differentiable primitive and of the composed encoder/decoder/head losses
/// on small random inputs. Inputs are kept away from ReLU and max-pool kinks.
std::vector<GradCheckResult> run_grad_suite(std::uint64_t seed = 0);

}  // namespace texrecon
