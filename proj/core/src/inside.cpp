// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/inside.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace texrecon {
namespace {

constexpr int kMaxAttempts = 16;

}  // namespace

InsideTester::InsideTester(const TriangleMesh& mesh, int axis) : axis_(axis), u_((axis + 1) % 3), v_((axis + 2) % 3) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("InsideTester: axis must be 0, 1 or 2");
  mesh.validate();
  if (!is_watertight(mesh)) throw std::invalid_argument("occupancy oracle: mesh is not watertight");
  box_ = tight_aabb(mesh);
  const double diag = std::max(box_.size().norm(), 1e-300);
  tol_ = 1e-12 * diag * diag;

  tris_.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    std::array<double, 9> t{};
    for (int i = 0; i < 3; ++i) {
      const Vec3& p = mesh.vertices[f[i]];
      t[3 * i + 0] = p[u_];
      t[3 * i + 1] = p[v_];
      t[3 * i + 2] = p[axis_];
    }
    tris_.push_back(t);
  }
  bins_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(tris_.size()) / 2.0)), 1, 512);
  const double pad = 1e-9 * diag;
  bin_u0_ = box_.min[u_] - pad;
  bin_v0_ = box_.min[v_] - pad;
  bin_du_ = (box_.size()[u_] + 2 * pad) / bins_;
  bin_dv_ = (box_.size()[v_] + 2 * pad) / bins_;

  const auto bin_range = [&](const std::array<double, 9>& t, int& u0, int& u1, int& v0, int& v1) {
    const double umin = std::min({t[0], t[3], t[6]}), umax = std::max({t[0], t[3], t[6]});
    const double vmin = std::min({t[1], t[4], t[7]}), vmax = std::max({t[1], t[4], t[7]});
    u0 = std::clamp(static_cast<int>(std::floor((umin - bin_u0_) / bin_du_)) - 1, 0, bins_ - 1);
    u1 = std::clamp(static_cast<int>(std::floor((umax - bin_u0_) / bin_du_)) + 1, 0, bins_ - 1);
    v0 = std::clamp(static_cast<int>(std::floor((vmin - bin_v0_) / bin_dv_)) - 1, 0, bins_ - 1);
    v1 = std::clamp(static_cast<int>(std::floor((vmax - bin_v0_) / bin_dv_)) + 1, 0, bins_ - 1);
  };
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(bins_) * bins_ + 1, 0);
  for (const auto& t : tris_) {
    int u0, u1, v0, v1;
    bin_range(t, u0, u1, v0, v1);
    for (int bv = v0; bv <= v1; ++bv) {
      for (int bu = u0; bu <= u1; ++bu) ++counts[static_cast<std::size_t>(bv) * bins_ + bu + 1];
    }
  }
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  bin_start_ = counts;
  bin_tris_.resize(counts.back());
  std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t ti = 0; ti < tris_.size(); ++ti) {
    int u0, u1, v0, v1;
    bin_range(tris_[ti], u0, u1, v0, v1);
    for (int bv = v0; bv <= v1; ++bv) {
      for (int bu = u0; bu <= u1; ++bu) bin_tris_[cursor[static_cast<std::size_t>(bv) * bins_ + bu]++] = static_cast<std::uint32_t>(ti);
    }
  }
}

int InsideTester::cast(double pu, double pv, double pa, bool& degenerate) const {
  degenerate = false;
  const int bu = std::clamp(static_cast<int>(std::floor((pu - bin_u0_) / bin_du_)), 0, bins_ - 1);
  const int bv = std::clamp(static_cast<int>(std::floor((pv - bin_v0_) / bin_dv_)), 0, bins_ - 1);
  const std::size_t b = static_cast<std::size_t>(bv) * bins_ + bu;
  int crossings = 0;
  for (std::uint32_t k = bin_start_[b]; k < bin_start_[b + 1]; ++k) {
    const auto& t = tris_[bin_tris_[k]];
    const double au = t[0], av = t[1], buu = t[3], bvv = t[4], cu = t[6], cv = t[7];
    const double area = (buu - au) * (cv - av) - (bvv - av) * (cu - au);
    if (std::abs(area) <= tol_) continue;  // seen edge-on; neighbours account for it
    const double e0 = (buu - pu) * (cv - pv) - (bvv - pv) * (cu - pu);
    const double e1 = (cu - pu) * (av - pv) - (cv - pv) * (au - pu);
    const double e2 = (au - pu) * (bvv - pv) - (av - pv) * (buu - pu);
    const bool strictly_in = (e0 > tol_ && e1 > tol_ && e2 > tol_) || (e0 < -tol_ && e1 < -tol_ && e2 < -tol_);
    if (!strictly_in) {
      const bool touches = (e0 >= -tol_ && e1 >= -tol_ && e2 >= -tol_) || (e0 <= tol_ && e1 <= tol_ && e2 <= tol_);
      if (touches) {
        degenerate = true;
        return 0;
      }
      continue;
    }
    const double hit = (e0 * t[2] + e1 * t[5] + e2 * t[8]) / area;
    if (hit > pa) ++crossings;
  }
  return crossings;
}

bool InsideTester::contains(const Vec3& p) const {
  if (!box_.contains(p)) return false;
  const double scale = box_.size().norm();
  int crossings = 0;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Jitter follows an additive recurrence so every attempt probes a new origin.
    const double ju = attempt ? scale * 1e-7 * (std::fmod(attempt * 0.7548776662466927, 1.0) - 0.5) : 0.0;
    const double jv = attempt ? scale * 1e-7 * (std::fmod(attempt * 0.5698402909980532, 1.0) - 0.5) : 0.0;
    bool degenerate = false;
    crossings = cast(p[u_] + ju, p[v_] + jv, p[axis_], degenerate);
    if (!degenerate) break;
  }
  return crossings % 2 == 1;
}

std::vector<std::uint8_t> occupancy_oracle(const TriangleMesh& mesh, std::span<const Vec3> points, int axis) {
  const InsideTester tester(mesh, axis);
  std::vector<std::uint8_t> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = tester.contains(points[i]) ? 1 : 0;
  return labels;
}

}  // namespace texrecon
