// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "texrecon/tensor.hpp"

// Differentiable primitives. Every op computes its forward value eagerly and,
// when any input requires a gradient, records a backward closure on the tape.
// Shape errors throw std::invalid_argument naming the op and the shapes.
namespace texrecon {

enum class Activation { kRelu, kSigmoid };

/// 3D convolution, stride 1, zero padding.
/// input [Cin,D,H,W], kernel [Cout,Cin,k,k,k], bias [Cout] -> [Cout,D',H',W'].
TensorPtr conv3d(Tape& tape, const TensorPtr& input, const TensorPtr& kernel, const TensorPtr& bias,
                 int padding);

/// Non-overlapping max pooling. Backward routes to the first maximum in
/// (z, y, x) scan order within each window.
TensorPtr maxpool3d(Tape& tape, const TensorPtr& input, int window = 2);

/// Per-channel normalization over the spatial dims of [C,D,H,W].
TensorPtr instance_norm(Tape& tape, const TensorPtr& input, double eps = 1e-5);

TensorPtr relu(Tape& tape, const TensorPtr& input);
/// Logistic sigmoid; results are clamped into the open interval (0, 1).
TensorPtr sigmoid(Tape& tape, const TensorPtr& input);
TensorPtr activation(Tape& tape, const TensorPtr& input, Activation kind);

/// Affine map over the trailing dimension: [..., Fin] x [Fout, Fin] + [Fout].
TensorPtr linear(Tape& tape, const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias);

/// 8-corner trilinear lookup of grid [C,D,H,W] at points [N,3] given as
/// normalized (x, y, z) in [0,1]^3; x runs along W, z along D. Sample i sits
/// at normalized coordinate (i + 0.5) / R. Coordinates are clamped to the
/// cell-center lattice, so queries outside it return the border value.
/// Differentiable with respect to the grid only.
TensorPtr trilinear_sample(Tape& tape, const TensorPtr& grid, std::span<const double> points);

/// Concatenates rank-2 tensors with equal row counts along columns.
TensorPtr concat_cols(Tape& tape, const std::vector<TensorPtr>& parts);

/// [C,D,H,W] -> [D*H*W, C], one row per spatial cell.
TensorPtr grid_to_rows(Tape& tape, const TensorPtr& grid);

/// Column-wise max over the rows of [R,F] -> [F]; first-row tie-break.
TensorPtr max_rows(Tape& tape, const TensorPtr& input);

TensorPtr reshape(Tape& tape, const TensorPtr& input, Shape shape);
TensorPtr add(Tape& tape, const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(Tape& tape, const TensorPtr& a, const TensorPtr& b);
TensorPtr scale(Tape& tape, const TensorPtr& input, double factor);
TensorPtr sum(Tape& tape, const TensorPtr& input);
TensorPtr mean(Tape& tape, const TensorPtr& input);

/// (1/R) * sum_rows ||pred_row - target_row||_1 for pred [R,C]. The target is
/// a constant. Subgradient at a zero residual is 0.
TensorPtr row_l1_mean(Tape& tape, const TensorPtr& pred, std::span<const double> target);

/// Weighted binary cross entropy over pred [N] (or [N,1]):
///   -(1/N) * sum w_pos*o*log(p) + w_neg*(1-o)*log(1-p)
/// with p clamped to [1e-7, 1-1e-7]; the gradient is evaluated at the
/// clamped probability.
TensorPtr weighted_bce(Tape& tape, const TensorPtr& pred, std::span<const double> labels, double w_pos,
                       double w_neg);

inline constexpr double kBceClamp = 1e-7;

}  // namespace texrecon
