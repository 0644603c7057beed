// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "texrecon/completion.hpp"
#include "texrecon/encoder.hpp"
#include "texrecon/marching_cubes.hpp"
#include "texrecon/mlp.hpp"
#include "texrecon/ops.hpp"

namespace {

using namespace texrecon;

TensorPtr random_tensor(Shape shape, std::mt19937_64& rng, bool grad = false) {
  auto t = make_tensor(std::move(shape), 0.0, grad);
  std::normal_distribution<double> n;
  for (auto& v : t->data()) v = n(rng);
  return t;
}

std::vector<double> random_points(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u;
  std::vector<double> p(3 * n);
  for (auto& v : p) v = u(rng);
  return p;
}

void BM_Conv3d(benchmark::State& state) {
  const auto r = static_cast<std::size_t>(state.range(0));
  const auto c = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  auto x = random_tensor({c, r, r, r}, rng);
  auto k = random_tensor({c, c, 3, 3, 3}, rng, state.range(2) != 0);
  auto b = random_tensor({c}, rng, state.range(2) != 0);
  for (auto _ : state) {
    Tape tape;
    auto y = conv3d(tape, x, k, b, 1);
    if (state.range(2) != 0) backward(sum(tape, y), tape);
    benchmark::DoNotOptimize(y->data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r * r * r));
}
BENCHMARK(BM_Conv3d)->Args({16, 8, 0})->Args({32, 16, 0})->Args({16, 8, 1})->Unit(benchmark::kMillisecond);

void BM_Trilinear(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  auto g = random_tensor({16, 32, 32, 32}, rng, true);
  const auto pts = random_points(n, rng);
  for (auto _ : state) {
    Tape tape;
    auto y = trilinear_sample(tape, g, pts);
    backward(sum(tape, y), tape);
    benchmark::DoNotOptimize(y->data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Trilinear)->Arg(2048)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_MarchingCubes(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::vector<double> field(static_cast<std::size_t>(k) * k * k);
  for (int z = 0; z < k; ++z)
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) {
        const Vec3 p = Vec3(x, y, z) / (k - 1) - Vec3::Constant(0.5);
        field[(static_cast<std::size_t>(z) * k + y) * k + x] = 0.35 - p.norm();
      }
  const Aabb box{Vec3::Zero(), Vec3::Ones()};
  for (auto _ : state) {
    auto mesh = marching_cubes(field, k, 0.0, box);
    benchmark::DoNotOptimize(mesh.faces.data());
  }
}
BENCHMARK(BM_MarchingCubes)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DecoderStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto h = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(3);
  EncoderConfig enc;
  enc.scales = 3;
  enc.channels = {8, 16, 16};
  enc.pe_bands = 4;
  ParamStore store;
  init_encoder(store, enc, "enc", rng);
  const MlpSpec spec = decoder_spec("dec", enc.feature_width(), {h, h, h}, 1);
  init_mlp(store, spec, rng);
  auto grid = make_tensor({1, 32, 32, 32});
  for (std::size_t i = 0; i < grid->numel(); i += 3) grid->data()[i] = 1.0;
  const auto pts = random_points(n, rng);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2;
  for (auto _ : state) {
    Tape tape;
    auto msf = encode(tape, grid, store, enc, "enc");
    auto occ = shape_decode(tape, store, spec, query_features(tape, msf, pts, enc.pe_bands));
    auto loss = balanced_bce(tape, occ, labels, BceWeighting::kInverseFrequency);
    backward(loss, tape);
    store.zero_grad();
    benchmark::DoNotOptimize(loss->data().data());
  }
}
BENCHMARK(BM_DecoderStep)->Args({2048, 64})->Args({2048, 256})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
