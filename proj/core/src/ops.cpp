// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace texrecon {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using StridedMat = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;
using ConstStridedMat = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

[[noreturn]] void fail(const std::string& op, const std::string& what) {
  throw std::invalid_argument(op + ": " + what);
}

void require_rank(const std::string& op, const TensorPtr& t, std::size_t rank, const char* name) {
  if (!t) fail(op, std::string(name) + " is null");
  if (t->rank() != rank) {
    fail(op, std::string(name) + " must have rank " + std::to_string(rank) + ", got " + shape_to_string(t->shape()));
  }
}

bool any_grad(std::initializer_list<const TensorPtr*> ts) {
  for (auto* t : ts) {
    if (*t && (*t)->requires_grad()) return true;
  }
  return false;
}

// Slabs of output planes keep the im2col buffer bounded for large grids.
constexpr std::size_t kIm2colBudget = std::size_t{1} << 23;

struct ConvGeom {
  std::size_t cin, d, h, w;
  std::size_t cout, k;
  std::ptrdiff_t pad;
  std::size_t od, oh, ow;
  std::size_t rows() const { return cin * k * k * k; }
};

void im2col(const double* in, const ConvGeom& g, std::size_t z0, std::size_t nz, double* col) {
  const std::size_t ncols = nz * g.oh * g.ow;
  const auto sd = static_cast<std::ptrdiff_t>(g.d);
  const auto sh = static_cast<std::ptrdiff_t>(g.h);
  const auto sw = static_cast<std::ptrdiff_t>(g.w);
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    for (std::size_t kz = 0; kz < g.k; ++kz) {
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        for (std::size_t kx = 0; kx < g.k; ++kx, ++row) {
          double* dst = col + row * ncols;
          const std::ptrdiff_t xoff = static_cast<std::ptrdiff_t>(kx) - g.pad;
          const std::ptrdiff_t xlo = std::clamp<std::ptrdiff_t>(-xoff, 0, static_cast<std::ptrdiff_t>(g.ow));
          const std::ptrdiff_t xhi = std::clamp<std::ptrdiff_t>(sw - xoff, xlo, static_cast<std::ptrdiff_t>(g.ow));
          for (std::size_t z = 0; z < nz; ++z) {
            const std::ptrdiff_t iz = static_cast<std::ptrdiff_t>(z0 + z + kz) - g.pad;
            for (std::size_t y = 0; y < g.oh; ++y, dst += g.ow) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y + ky) - g.pad;
              if (iz < 0 || iz >= sd || iy < 0 || iy >= sh) {
                std::fill(dst, dst + g.ow, 0.0);
                continue;
              }
              const double* src = in + ((ci * g.d + static_cast<std::size_t>(iz)) * g.h + static_cast<std::size_t>(iy)) * g.w;
              std::fill(dst, dst + xlo, 0.0);
              if (xhi > xlo) std::memcpy(dst + xlo, src + xlo + xoff, static_cast<std::size_t>(xhi - xlo) * sizeof(double));
              std::fill(dst + xhi, dst + g.ow, 0.0);
            }
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvGeom& g, std::size_t z0, std::size_t nz, double* in_grad) {
  const std::size_t ncols = nz * g.oh * g.ow;
  const auto sd = static_cast<std::ptrdiff_t>(g.d);
  const auto sh = static_cast<std::ptrdiff_t>(g.h);
  const auto sw = static_cast<std::ptrdiff_t>(g.w);
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    for (std::size_t kz = 0; kz < g.k; ++kz) {
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        for (std::size_t kx = 0; kx < g.k; ++kx, ++row) {
          const double* src = col + row * ncols;
          const std::ptrdiff_t xoff = static_cast<std::ptrdiff_t>(kx) - g.pad;
          const std::ptrdiff_t xlo = std::clamp<std::ptrdiff_t>(-xoff, 0, static_cast<std::ptrdiff_t>(g.ow));
          const std::ptrdiff_t xhi = std::clamp<std::ptrdiff_t>(sw - xoff, xlo, static_cast<std::ptrdiff_t>(g.ow));
          for (std::size_t z = 0; z < nz; ++z) {
            const std::ptrdiff_t iz = static_cast<std::ptrdiff_t>(z0 + z + kz) - g.pad;
            for (std::size_t y = 0; y < g.oh; ++y, src += g.ow) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y + ky) - g.pad;
              if (iz < 0 || iz >= sd || iy < 0 || iy >= sh) continue;
              double* dst = in_grad + ((ci * g.d + static_cast<std::size_t>(iz)) * g.h + static_cast<std::size_t>(iy)) * g.w;
              for (std::ptrdiff_t x = xlo; x < xhi; ++x) dst[x + xoff] += src[x];
            }
          }
        }
      }
    }
  }
}

double clamp_open_unit(double s) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(s, lo, hi);
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

TensorPtr conv3d(Tape& tape, const TensorPtr& input, const TensorPtr& kernel, const TensorPtr& bias, int padding) {
  const std::string op = "conv3d";
  require_rank(op, input, 4, "input");
  require_rank(op, kernel, 5, "kernel");
  require_rank(op, bias, 1, "bias");
  const std::size_t k = kernel->dim(2);
  if (kernel->dim(3) != k || kernel->dim(4) != k || k % 2 == 0) {
    fail(op, "kernel must be cubic with odd size, got " + shape_to_string(kernel->shape()));
  }
  if (kernel->dim(1) != input->dim(0)) {
    fail(op, "kernel expects " + std::to_string(kernel->dim(1)) + " input channels but input " +
                 shape_to_string(input->shape()) + " has " + std::to_string(input->dim(0)));
  }
  if (bias->dim(0) != kernel->dim(0)) fail(op, "bias length must equal output channels");
  if (padding < 0) fail(op, "padding must be non-negative");

  ConvGeom g{};
  g.cin = input->dim(0);
  g.d = input->dim(1);
  g.h = input->dim(2);
  g.w = input->dim(3);
  g.cout = kernel->dim(0);
  g.k = k;
  g.pad = padding;
  const auto out_extent = [&](std::size_t n) -> std::size_t {
    const std::ptrdiff_t e = static_cast<std::ptrdiff_t>(n) + 2 * padding - static_cast<std::ptrdiff_t>(k) + 1;
    if (e <= 0) fail(op, "kernel larger than padded input " + shape_to_string(input->shape()));
    return static_cast<std::size_t>(e);
  };
  g.od = out_extent(g.d);
  g.oh = out_extent(g.h);
  g.ow = out_extent(g.w);

  const std::size_t plane = g.oh * g.ow;
  const std::size_t out_stride = g.od * plane;
  const std::size_t rows = g.rows();
  const std::size_t slab = std::clamp<std::size_t>(kIm2colBudget / std::max<std::size_t>(1, rows * plane), 1, g.od);

  auto out = make_tensor({g.cout, g.od, g.oh, g.ow});
  ConstMapMat wmat(kernel->data().data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(rows));
  Buffer col(rows * slab * plane);
  for (std::size_t z0 = 0; z0 < g.od; z0 += slab) {
    const std::size_t nz = std::min(slab, g.od - z0);
    const auto ncols = static_cast<Eigen::Index>(nz * plane);
    im2col(input->data().data(), g, z0, nz, col.data());
    StridedMat oslab(out->data().data() + z0 * plane, static_cast<Eigen::Index>(g.cout), ncols,
                     Eigen::OuterStride<>(static_cast<Eigen::Index>(out_stride)));
    oslab.noalias() = wmat * ConstMapMat(col.data(), static_cast<Eigen::Index>(rows), ncols);
    for (std::size_t co = 0; co < g.cout; ++co) oslab.row(static_cast<Eigen::Index>(co)).array() += bias->data()[co];
  }

  if (!any_grad({&input, &kernel, &bias})) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input, kernel, bias, g, rows, plane, out_stride, slab]() {
    const double* gout = o->grad().data();
    ConstMapMat wmat(kernel->data().data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(rows));
    Buffer col(rows * slab * plane);
    Buffer dcol;
    for (std::size_t z0 = 0; z0 < g.od; z0 += slab) {
      const std::size_t nz = std::min(slab, g.od - z0);
      const auto ncols = static_cast<Eigen::Index>(nz * plane);
      ConstStridedMat gslab(gout + z0 * plane, static_cast<Eigen::Index>(g.cout), ncols,
                            Eigen::OuterStride<>(static_cast<Eigen::Index>(out_stride)));
      if (kernel->requires_grad()) {
        im2col(input->data().data(), g, z0, nz, col.data());
        MapMat gw(kernel->grad_mut().data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(rows));
        gw.noalias() += gslab * ConstMapMat(col.data(), static_cast<Eigen::Index>(rows), ncols).transpose();
      }
      if (input->requires_grad()) {
        dcol.resize(rows * nz * plane);
        MapMat dc(dcol.data(), static_cast<Eigen::Index>(rows), ncols);
        dc.noalias() = wmat.transpose() * gslab;
        col2im_add(dcol.data(), g, z0, nz, input->grad_mut().data());
      }
      if (bias->requires_grad()) {
        auto gb = bias->grad_mut();
        for (std::size_t co = 0; co < g.cout; ++co) gb[co] += gslab.row(static_cast<Eigen::Index>(co)).sum();
      }
    }
  });
  return out;
}

TensorPtr maxpool3d(Tape& tape, const TensorPtr& input, int window) {
  const std::string op = "maxpool3d";
  require_rank(op, input, 4, "input");
  if (window < 1) fail(op, "window must be positive");
  const auto wdw = static_cast<std::size_t>(window);
  const std::size_t c = input->dim(0), d = input->dim(1), h = input->dim(2), w = input->dim(3);
  if (d % wdw || h % wdw || w % wdw) {
    fail(op, "spatial dims of " + shape_to_string(input->shape()) + " not divisible by window " + std::to_string(window));
  }
  const std::size_t od = d / wdw, oh = h / wdw, ow = w / wdw;
  auto out = make_tensor({c, od, oh, ow});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out->numel());
  const auto in = input->data();
  auto dst = out->data();
  std::size_t o = 0;
  for (std::size_t ci = 0; ci < c; ++ci) {
    for (std::size_t z = 0; z < od; ++z) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x, ++o) {
          std::size_t best = ((ci * d + z * wdw) * h + y * wdw) * w + x * wdw;
          double best_v = in[best];
          for (std::size_t dz = 0; dz < wdw; ++dz) {
            for (std::size_t dy = 0; dy < wdw; ++dy) {
              for (std::size_t dx = 0; dx < wdw; ++dx) {
                const std::size_t idx = ((ci * d + z * wdw + dz) * h + y * wdw + dy) * w + x * wdw + dx;
                if (in[idx] > best_v) {
                  best_v = in[idx];
                  best = idx;
                }
              }
            }
          }
          dst[o] = best_v;
          (*argmax)[o] = best;
        }
      }
    }
  }
  if (!input->requires_grad()) return out;
  Tensor* op_out = out.get();
  tape.record(out, [op_out, input, argmax]() {
    const auto g = op_out->grad();
    auto gi = input->grad_mut();
    for (std::size_t i = 0; i < g.size(); ++i) gi[(*argmax)[i]] += g[i];
  });
  return out;
}

TensorPtr instance_norm(Tape& tape, const TensorPtr& input, double eps) {
  const std::string op = "instance_norm";
  require_rank(op, input, 4, "input");
  if (!(eps > 0)) fail(op, "eps must be positive");
  const std::size_t c = input->dim(0);
  const std::size_t n = input->numel() / std::max<std::size_t>(c, 1);
  auto out = make_tensor(input->shape());
  auto inv_std = std::make_shared<std::vector<double>>(c);
  const auto in = input->data();
  auto y = out->data();
  for (std::size_t ci = 0; ci < c; ++ci) {
    const double* x = in.data() + ci * n;
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m += x[i];
    m /= static_cast<double>(n);
    double v = 0;
    for (std::size_t i = 0; i < n; ++i) v += (x[i] - m) * (x[i] - m);
    v /= static_cast<double>(n);
    const double s = 1.0 / std::sqrt(v + eps);
    (*inv_std)[ci] = s;
    for (std::size_t i = 0; i < n; ++i) y[ci * n + i] = (x[i] - m) * s;
  }
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input, inv_std, c, n]() {
    const auto gy = o->grad();
    const auto yv = o->data();
    auto gx = input->grad_mut();
    for (std::size_t ci = 0; ci < c; ++ci) {
      double mg = 0, mgy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        mg += gy[ci * n + i];
        mgy += gy[ci * n + i] * yv[ci * n + i];
      }
      mg /= static_cast<double>(n);
      mgy /= static_cast<double>(n);
      const double s = (*inv_std)[ci];
      for (std::size_t i = 0; i < n; ++i) {
        gx[ci * n + i] += s * (gy[ci * n + i] - mg - yv[ci * n + i] * mgy);
      }
    }
  });
  return out;
}

TensorPtr relu(Tape& tape, const TensorPtr& input) {
  if (!input) fail("relu", "input is null");
  auto out = make_tensor(input->shape());
  const auto in = input->data();
  auto y = out->data();
  for (std::size_t i = 0; i < in.size(); ++i) y[i] = in[i] > 0 ? in[i] : 0.0;
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input]() {
    const auto g = o->grad();
    const auto x = input->data();
    auto gi = input->grad_mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0) gi[i] += g[i];
    }
  });
  return out;
}

TensorPtr sigmoid(Tape& tape, const TensorPtr& input) {
  if (!input) fail("sigmoid", "input is null");
  auto out = make_tensor(input->shape());
  const auto in = input->data();
  auto y = out->data();
  for (std::size_t i = 0; i < in.size(); ++i) y[i] = clamp_open_unit(stable_sigmoid(in[i]));
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input]() {
    const auto g = o->grad();
    const auto s = o->data();
    auto gi = input->grad_mut();
    for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * s[i] * (1.0 - s[i]);
  });
  return out;
}

TensorPtr activation(Tape& tape, const TensorPtr& input, Activation kind) {
  return kind == Activation::kRelu ? relu(tape, input) : sigmoid(tape, input);
}

TensorPtr linear(Tape& tape, const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias) {
  const std::string op = "linear";
  if (!input || input->rank() < 1) fail(op, "input must have rank >= 1");
  require_rank(op, weight, 2, "weight");
  require_rank(op, bias, 1, "bias");
  const std::size_t fin = input->shape().back();
  const std::size_t fout = weight->dim(0);
  if (weight->dim(1) != fin) {
    fail(op, "input trailing dim " + std::to_string(fin) + " does not match weight " + shape_to_string(weight->shape()));
  }
  if (bias->dim(0) != fout) fail(op, "bias length must equal weight rows");
  const std::size_t rows = fin ? input->numel() / fin : 0;
  Shape out_shape = input->shape();
  out_shape.back() = fout;
  auto out = make_tensor(out_shape);
  const auto r = static_cast<Eigen::Index>(rows);
  const auto fi = static_cast<Eigen::Index>(fin);
  const auto fo = static_cast<Eigen::Index>(fout);
  {
    ConstMapMat x(input->data().data(), r, fi);
    ConstMapMat wm(weight->data().data(), fo, fi);
    MapMat y(out->data().data(), r, fo);
    y.noalias() = x * wm.transpose();
    Eigen::Map<const Eigen::RowVectorXd> b(bias->data().data(), fo);
    y.rowwise() += b;
  }
  if (!any_grad({&input, &weight, &bias})) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input, weight, bias, r, fi, fo]() {
    ConstMapMat gy(o->grad().data(), r, fo);
    if (input->requires_grad()) {
      MapMat gx(input->grad_mut().data(), r, fi);
      gx.noalias() += gy * ConstMapMat(weight->data().data(), fo, fi);
    }
    if (weight->requires_grad()) {
      MapMat gw(weight->grad_mut().data(), fo, fi);
      gw.noalias() += gy.transpose() * ConstMapMat(input->data().data(), r, fi);
    }
    if (bias->requires_grad()) {
      Eigen::Map<Eigen::RowVectorXd> gb(bias->grad_mut().data(), fo);
      gb += gy.colwise().sum();
    }
  });
  return out;
}

namespace {

struct AxisLerp {
  std::size_t i0, i1;
  double t;
};

AxisLerp axis_lerp(double coord, std::size_t res) {
  if (!std::isfinite(coord)) coord = 0.0;
  const double u = std::clamp(std::clamp(coord, 0.0, 1.0) * static_cast<double>(res) - 0.5, 0.0,
                              static_cast<double>(res - 1));
  if (res == 1) return {0, 0, 0.0};
  auto i0 = static_cast<std::size_t>(std::floor(u));
  if (i0 > res - 2) i0 = res - 2;
  return {i0, i0 + 1, u - static_cast<double>(i0)};
}

}  // namespace

TensorPtr trilinear_sample(Tape& tape, const TensorPtr& grid, std::span<const double> points) {
  const std::string op = "trilinear_sample";
  require_rank(op, grid, 4, "grid");
  if (points.size() % 3) fail(op, "points must be a flat N x 3 array");
  const std::size_t n = points.size() / 3;
  const std::size_t c = grid->dim(0), d = grid->dim(1), h = grid->dim(2), w = grid->dim(3);
  const std::size_t cells = d * h * w;
  auto out = make_tensor({n, c});
  // Per point: 8 flat cell offsets and weights.
  auto corners = std::make_shared<std::vector<std::pair<std::size_t, double>>>(n * 8);
  const auto g = grid->data();
  auto y = out->data();
  for (std::size_t p = 0; p < n; ++p) {
    const AxisLerp lx = axis_lerp(points[3 * p + 0], w);
    const AxisLerp ly = axis_lerp(points[3 * p + 1], h);
    const AxisLerp lz = axis_lerp(points[3 * p + 2], d);
    auto* cp = corners->data() + p * 8;
    int j = 0;
    for (int bz = 0; bz < 2; ++bz) {
      const std::size_t z = bz ? lz.i1 : lz.i0;
      const double wz = bz ? lz.t : 1.0 - lz.t;
      for (int by = 0; by < 2; ++by) {
        const std::size_t yy = by ? ly.i1 : ly.i0;
        const double wy = by ? ly.t : 1.0 - ly.t;
        for (int bx = 0; bx < 2; ++bx, ++j) {
          const std::size_t x = bx ? lx.i1 : lx.i0;
          const double wx = bx ? lx.t : 1.0 - lx.t;
          cp[j] = {(z * h + yy) * w + x, wz * wy * wx};
        }
      }
    }
    for (std::size_t ci = 0; ci < c; ++ci) {
      const double* gc = g.data() + ci * cells;
      double acc = 0;
      for (int q = 0; q < 8; ++q) acc += cp[q].second * gc[cp[q].first];
      y[p * c + ci] = acc;
    }
  }
  if (!grid->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, grid, corners, n, c, cells]() {
    const auto go = o->grad();
    auto gg = grid->grad_mut();
    for (std::size_t p = 0; p < n; ++p) {
      const auto* cp = corners->data() + p * 8;
      for (std::size_t ci = 0; ci < c; ++ci) {
        const double gv = go[p * c + ci];
        if (gv == 0.0) continue;
        double* gc = gg.data() + ci * cells;
        for (int q = 0; q < 8; ++q) gc[cp[q].first] += cp[q].second * gv;
      }
    }
  });
  return out;
}

TensorPtr concat_cols(Tape& tape, const std::vector<TensorPtr>& parts) {
  const std::string op = "concat_cols";
  if (parts.empty()) fail(op, "no inputs");
  const std::size_t rows = parts.front() ? parts.front()->dim(0) : 0;
  std::size_t total = 0;
  bool rg = false;
  for (const auto& p : parts) {
    require_rank(op, p, 2, "part");
    if (p->dim(0) != rows) fail(op, "row count mismatch: " + shape_to_string(p->shape()));
    total += p->dim(1);
    rg = rg || p->requires_grad();
  }
  auto out = make_tensor({rows, total});
  auto y = out->data();
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t pc = p->dim(1);
    const auto x = p->data();
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(x.data() + r * pc, pc, y.data() + r * total + off);
    off += pc;
  }
  if (!rg) return out;
  Tensor* o = out.get();
  tape.record(out, [o, parts, rows, total]() {
    const auto g = o->grad();
    std::size_t off = 0;
    for (const auto& p : parts) {
      const std::size_t pc = p->dim(1);
      if (p->requires_grad()) {
        auto gp = p->grad_mut();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < pc; ++j) gp[r * pc + j] += g[r * total + off + j];
        }
      }
      off += pc;
    }
  });
  return out;
}

TensorPtr grid_to_rows(Tape& tape, const TensorPtr& grid) {
  require_rank("grid_to_rows", grid, 4, "grid");
  const std::size_t c = grid->dim(0);
  const std::size_t cells = grid->numel() / std::max<std::size_t>(c, 1);
  auto out = make_tensor({cells, c});
  const auto x = grid->data();
  auto y = out->data();
  for (std::size_t ci = 0; ci < c; ++ci) {
    for (std::size_t i = 0; i < cells; ++i) y[i * c + ci] = x[ci * cells + i];
  }
  if (!grid->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, grid, c, cells]() {
    const auto g = o->grad();
    auto gg = grid->grad_mut();
    for (std::size_t ci = 0; ci < c; ++ci) {
      for (std::size_t i = 0; i < cells; ++i) gg[ci * cells + i] += g[i * c + ci];
    }
  });
  return out;
}

TensorPtr max_rows(Tape& tape, const TensorPtr& input) {
  require_rank("max_rows", input, 2, "input");
  const std::size_t r = input->dim(0), f = input->dim(1);
  if (r == 0) fail("max_rows", "input has no rows");
  auto out = make_tensor({f});
  auto argmax = std::make_shared<std::vector<std::size_t>>(f, 0);
  const auto x = input->data();
  auto y = out->data();
  for (std::size_t j = 0; j < f; ++j) {
    double best = x[j];
    std::size_t bi = 0;
    for (std::size_t i = 1; i < r; ++i) {
      if (x[i * f + j] > best) {
        best = x[i * f + j];
        bi = i;
      }
    }
    y[j] = best;
    (*argmax)[j] = bi;
  }
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input, argmax, f]() {
    const auto g = o->grad();
    auto gi = input->grad_mut();
    for (std::size_t j = 0; j < f; ++j) gi[(*argmax)[j] * f + j] += g[j];
  });
  return out;
}

TensorPtr reshape(Tape& tape, const TensorPtr& input, Shape shape) {
  if (shape_numel(shape) != input->numel()) {
    fail("reshape", "cannot view " + shape_to_string(input->shape()) + " as " + shape_to_string(shape));
  }
  auto out = make_tensor(std::move(shape), input->storage());
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input]() {
    const auto g = o->grad();
    auto gi = input->grad_mut();
    for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
  });
  return out;
}

TensorPtr add(Tape& tape, const TensorPtr& a, const TensorPtr& b) {
  if (a->shape() != b->shape()) fail("add", shape_to_string(a->shape()) + " vs " + shape_to_string(b->shape()));
  auto out = make_tensor(a->shape());
  for (std::size_t i = 0; i < out->numel(); ++i) out->data()[i] = a->data()[i] + b->data()[i];
  if (!any_grad({&a, &b})) return out;
  Tensor* o = out.get();
  tape.record(out, [o, a, b]() {
    const auto g = o->grad();
    for (const auto* t : {&a, &b}) {
      if (!(*t)->requires_grad()) continue;
      auto gt = (*t)->grad_mut();
      for (std::size_t i = 0; i < g.size(); ++i) gt[i] += g[i];
    }
  });
  return out;
}

TensorPtr mul(Tape& tape, const TensorPtr& a, const TensorPtr& b) {
  if (a->shape() != b->shape()) fail("mul", shape_to_string(a->shape()) + " vs " + shape_to_string(b->shape()));
  auto out = make_tensor(a->shape());
  for (std::size_t i = 0; i < out->numel(); ++i) out->data()[i] = a->data()[i] * b->data()[i];
  if (!any_grad({&a, &b})) return out;
  Tensor* o = out.get();
  tape.record(out, [o, a, b]() {
    const auto g = o->grad();
    if (a->requires_grad()) {
      auto ga = a->grad_mut();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b->data()[i];
    }
    if (b->requires_grad()) {
      auto gb = b->grad_mut();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a->data()[i];
    }
  });
  return out;
}

TensorPtr scale(Tape& tape, const TensorPtr& input, double factor) {
  auto out = make_tensor(input->shape());
  for (std::size_t i = 0; i < out->numel(); ++i) out->data()[i] = input->data()[i] * factor;
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input, factor]() {
    const auto g = o->grad();
    auto gi = input->grad_mut();
    for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * factor;
  });
  return out;
}

TensorPtr sum(Tape& tape, const TensorPtr& input) {
  double s = 0;
  for (double v : input->data()) s += v;
  auto out = make_tensor({1}, s);
  if (!input->requires_grad()) return out;
  Tensor* o = out.get();
  tape.record(out, [o, input]() {
    const double g = o->grad()[0];
    for (auto& gi : input->grad_mut()) gi += g;
  });
  return out;
}

TensorPtr mean(Tape& tape, const TensorPtr& input) {
  if (input->numel() == 0) fail("mean", "empty input");
  return scale(tape, sum(tape, input), 1.0 / static_cast<double>(input->numel()));
}

TensorPtr row_l1_mean(Tape& tape, const TensorPtr& pred, std::span<const double> target) {
  const std::string op = "row_l1_mean";
  if (!pred || pred->numel() == 0) fail(op, "empty prediction");
  if (target.size() != pred->numel()) {
    fail(op, "target has " + std::to_string(target.size()) + " values, prediction " + shape_to_string(pred->shape()));
  }
  const std::size_t rows = pred->rank() >= 2 ? pred->dim(0) : 1;
  const double inv_rows = 1.0 / static_cast<double>(rows);
  double s = 0;
  const auto p = pred->data();
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - target[i]);
  auto out = make_tensor({1}, s * inv_rows);
  if (!pred->requires_grad()) return out;
  Tensor* o = out.get();
  std::vector<double> tgt(target.begin(), target.end());
  tape.record(out, [o, pred, tgt = std::move(tgt), inv_rows]() {
    const double g = o->grad()[0] * inv_rows;
    const auto p = pred->data();
    auto gp = pred->grad_mut();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double r = p[i] - tgt[i];
      gp[i] += r > 0 ? g : (r < 0 ? -g : 0.0);
    }
  });
  return out;
}

TensorPtr weighted_bce(Tape& tape, const TensorPtr& pred, std::span<const double> labels, double w_pos, double w_neg) {
  const std::string op = "weighted_bce";
  if (!pred || pred->numel() == 0) fail(op, "empty prediction");
  if (labels.size() != pred->numel()) {
    fail(op, "label count " + std::to_string(labels.size()) + " does not match prediction " + shape_to_string(pred->shape()));
  }
  const std::size_t n = labels.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto p = pred->data();
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
    s += w_pos * labels[i] * std::log(q) + w_neg * (1.0 - labels[i]) * std::log(1.0 - q);
  }
  auto out = make_tensor({1}, -s * inv_n);
  if (!pred->requires_grad()) return out;
  Tensor* o = out.get();
  std::vector<double> lab(labels.begin(), labels.end());
  tape.record(out, [o, pred, lab = std::move(lab), w_pos, w_neg, inv_n]() {
    const double g = o->grad()[0] * inv_n;
    const auto p = pred->data();
    auto gp = pred->grad_mut();
    for (std::size_t i = 0; i < lab.size(); ++i) {
      const double q = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
      gp[i] += -g * (w_pos * lab[i] / q - w_neg * (1.0 - lab[i]) / (1.0 - q));
    }
  });
  return out;
}

}  // namespace texrecon
