// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace texrecon {

double grad_check(const ForwardFn& forward, const std::vector<TensorPtr>& inputs, double step) {
  if (!(step > 0)) throw std::invalid_argument("grad_check: step must be positive");
  for (const auto& in : inputs) {
    in->set_requires_grad(true);
    in->clear_grad();
  }
  {
    Tape tape;
    auto loss = forward(tape);
    if (loss->numel() != 1) throw std::invalid_argument("grad_check: forward must return a scalar");
    if (loss->requires_grad() && !tape.empty()) backward(loss, tape);
  }
  const auto eval = [&]() {
    Tape tape;
    return forward(tape)->item();
  };
  double worst = 0.0;
  for (const auto& in : inputs) {
    const std::vector<double> analytic = in->has_grad()
                                             ? std::vector<double>(in->grad().begin(), in->grad().end())
                                             : std::vector<double>(in->numel(), 0.0);
    auto x = in->data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      x[i] = orig + step;
      const double fp = eval();
      x[i] = orig - step;
      const double fm = eval();
      x[i] = orig;
      const double numeric = (fp - fm) / (2.0 * step);
      const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace texrecon
