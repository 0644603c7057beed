// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/grad_suite.hpp"

#include <random>

#include "texrecon/completion.hpp"
#include "texrecon/encoder.hpp"
#include "texrecon/grad_check.hpp"
#include "texrecon/ops.hpp"
#include "texrecon/priors.hpp"

namespace texrecon {

namespace {

constexpr double kStep = 1e-5;

TensorPtr random_param(Shape shape, std::mt19937_64& rng, double lo = -1, double hi = 1, double margin = 0) {
  std::uniform_real_distribution<double> u(lo, hi);
  auto t = make_tensor(std::move(shape), 0.0, true);
  for (auto& v : t->data()) {
    v = u(rng);
    if (margin > 0) v += v >= 0 ? margin : -margin;
  }
  return t;
}

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

/// Weighted sum so every output element gets a distinct upstream gradient.
TensorPtr project(Tape& t, const TensorPtr& y, const TensorPtr& w) { return sum(t, mul(t, y, w)); }

}  // namespace

std::vector<GradCheckResult> run_grad_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GradCheckResult> out;
  auto check = [&](const std::string& name, const ForwardFn& f, const std::vector<TensorPtr>& inputs) {
    out.push_back({name, grad_check(f, inputs, kStep)});
  };

  {
    auto x = random_param({2, 5, 5, 5}, rng);
    auto k = random_param({3, 2, 3, 3, 3}, rng, -0.5, 0.5);
    auto b = random_param({3}, rng);
    auto w = make_tensor({3, 5, 5, 5}, random_values(375, rng, -1, 1));
    check("conv3d", [&](Tape& t) { return project(t, conv3d(t, x, k, b, 1), w); }, {x, k, b});
  }
  {
    auto x = random_param({2, 4, 4, 4}, rng);
    auto w = make_tensor({2, 2, 2, 2}, random_values(16, rng, -1, 1));
    check("maxpool3d", [&](Tape& t) { return project(t, maxpool3d(t, x, 2), w); }, {x});
  }
  {
    auto x = random_param({3, 4, 4, 4}, rng);
    auto w = make_tensor({3, 4, 4, 4}, random_values(192, rng, -1, 1));
    check("instance_norm", [&](Tape& t) { return project(t, instance_norm(t, x), w); }, {x});
  }
  {
    auto x = random_param({20}, rng, -1, 1, 0.05);
    auto w = make_tensor({20}, random_values(20, rng, -1, 1));
    check("relu", [&](Tape& t) { return project(t, relu(t, x), w); }, {x});
    check("sigmoid", [&](Tape& t) { return project(t, sigmoid(t, x), w); }, {x});
  }
  {
    auto x = random_param({4, 5}, rng);
    auto wt = random_param({3, 5}, rng);
    auto b = random_param({3}, rng);
    auto w = make_tensor({4, 3}, random_values(12, rng, -1, 1));
    check("linear", [&](Tape& t) { return project(t, linear(t, x, wt, b), w); }, {x, wt, b});
  }
  {
    auto g = random_param({2, 4, 4, 4}, rng);
    const auto pts = random_values(30, rng, 0.0, 1.0);
    auto w = make_tensor({10, 2}, random_values(20, rng, -1, 1));
    check("trilinear_sample", [&](Tape& t) { return project(t, trilinear_sample(t, g, pts), w); }, {g});
  }
  {
    auto a = random_param({3, 2}, rng);
    auto b = random_param({3, 4}, rng);
    auto w = make_tensor({3, 6}, random_values(18, rng, -1, 1));
    check("concat_cols", [&](Tape& t) { return project(t, concat_cols(t, {a, b}), w); }, {a, b});
  }
  {
    auto g = random_param({3, 2, 2, 2}, rng);
    auto w = make_tensor({8, 3}, random_values(24, rng, -1, 1));
    check("grid_to_rows", [&](Tape& t) { return project(t, grid_to_rows(t, g), w); }, {g});
    auto wm = make_tensor({3}, random_values(3, rng, -1, 1));
    check("max_rows", [&](Tape& t) { return project(t, max_rows(t, grid_to_rows(t, g)), wm); }, {g});
    auto wr = make_tensor({4, 6}, random_values(24, rng, -1, 1));
    check("reshape", [&](Tape& t) { return project(t, reshape(t, g, {4, 6}), wr); }, {g});
  }
  {
    auto a = random_param({6}, rng);
    auto b = random_param({6}, rng);
    auto w = make_tensor({6}, random_values(6, rng, -1, 1));
    check("add", [&](Tape& t) { return project(t, add(t, a, b), w); }, {a, b});
    check("mul", [&](Tape& t) { return project(t, mul(t, a, b), w); }, {a, b});
    check("scale", [&](Tape& t) { return project(t, scale(t, a, -2.5), w); }, {a});
    check("sum", [&](Tape& t) { return sum(t, mul(t, a, a)); }, {a});
    check("mean", [&](Tape& t) { return mean(t, mul(t, a, b)); }, {a, b});
  }
  {
    auto p = random_param({8}, rng, 0.05, 0.95);
    const std::vector<double> labels{1, 0, 0, 1, 0, 0, 0, 1};
    check("weighted_bce", [&](Tape& t) { return weighted_bce(t, p, labels, 0.6, 0.4); }, {p});
    check("balanced_bce", [&](Tape& t) { return balanced_bce(t, p, labels, BceWeighting::kInverseFrequency); }, {p});
    auto q = random_param({4, 3}, rng);
    // Targets sit at least 0.1 away from every prediction.
    std::vector<double> target(12);
    for (std::size_t i = 0; i < 12; ++i) target[i] = q->data()[i] + (i % 2 ? 0.3 : -0.4);
    check("row_l1_mean", [&](Tape& t) { return row_l1_mean(t, q, target); }, {q});
    auto c = random_param({4, 3}, rng, 0.2, 0.8);
    check("texture_loss", [&](Tape& t) { return texture_loss(t, c, target); }, {c});
  }

  // Composed networks.
  EncoderConfig enc;
  enc.scales = 2;
  enc.channels = {3, 4};
  enc.pe_bands = 2;
  const auto pts = random_values(3 * 6, rng, 0.05, 0.95);
  {
    ParamStore store;
    enc.input_channels = 2;
    init_encoder(store, enc, "enc", rng);
    const MlpSpec dec = decoder_spec("dec", enc.feature_width(), {6, 5}, 1);
    init_mlp(store, dec, rng);
    auto input = random_param({2, 8, 8, 8}, rng, 0, 1);
    const std::vector<double> labels{1, 0, 0, 1, 0, 0};
    std::vector<TensorPtr> inputs{input};
    for (const auto& [name, slot] : store.slots()) inputs.push_back(slot.value);
    check("encoder+shape_decoder+balanced_bce",
          [&](Tape& t) {
            const auto msf = encode(t, input, store, enc, "enc");
            return balanced_bce(t, shape_decode(t, store, dec, query_features(t, msf, pts, enc.pe_bands)), labels,
                                BceWeighting::kInverseFrequency);
          },
          inputs);
  }
  {
    ParamStore store;
    enc.input_channels = 4;
    init_encoder(store, enc, "enc", rng);
    const MlpSpec dec = decoder_spec("dec", enc.feature_width(), {6}, 3);
    init_mlp(store, dec, rng);
    auto input = random_param({4, 8, 8, 8}, rng, 0, 1);
    const auto colors = random_values(18, rng, 0, 1);
    std::vector<TensorPtr> inputs{input};
    for (const auto& [name, slot] : store.slots()) inputs.push_back(slot.value);
    check("encoder+texture_decoder+texture_loss",
          [&](Tape& t) {
            const auto msf = encode(t, input, store, enc, "enc");
            return texture_loss(t, texture_decode(t, store, dec, query_features(t, msf, pts, enc.pe_bands)), colors);
          },
          inputs);
  }
  for (HeadKind kind : {HeadKind::kPose, HeadKind::kBbox}) {
    ParamStore store;
    enc.input_channels = 1;
    init_encoder(store, enc, "enc", rng);
    HeadConfig head;
    head.hidden = {6};
    init_global_head(store, "head", 4, kind, head, rng);
    auto input = random_param({1, 8, 8, 8}, rng, 0, 1);
    std::vector<TensorPtr> inputs{input};
    for (const auto& [name, slot] : store.slots()) inputs.push_back(slot.value);
    Skeleton25 skel = rest_skeleton();
    for (auto& j : skel.joints) j += Vec3::Constant(50.0);
    const RelBox rel{50, -50, 50, 50, -50, 50};
    check(kind == HeadKind::kPose ? "encoder+pose_head+pose_loss" : "encoder+bbox_head+bbox_loss",
          [&](Tape& t) {
            const auto msf = encode(t, input, store, enc, "enc");
            const auto pred = global_head(t, msf, store, "head", kind, head);
            return kind == HeadKind::kPose ? pose_loss(t, pred, skel) : bbox_loss(t, pred, rel);
          },
          inputs);
  }
  return out;
}

}  // namespace texrecon
