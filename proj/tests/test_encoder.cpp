// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "texrecon/encoder.hpp"
#include "texrecon/grad_check.hpp"
#include "texrecon/mlp.hpp"
#include "texrecon/ops.hpp"

using namespace texrecon;

namespace {

TensorPtr random_grid(int c, int k, std::mt19937_64& rng) {
  return std::make_shared<Tensor>(oracle::random_tensor({std::size_t(c), std::size_t(k), std::size_t(k), std::size_t(k)}, rng, 0, 1));
}

}  // namespace

TEST_CASE("encoder pyramid shapes") {
  std::mt19937_64 rng(1);
  EncoderConfig cfg;
  ParamStore store;
  init_encoder(store, cfg, "enc", rng);
  Tape tape;
  const auto msf = encode(tape, random_grid(1, 64, rng), store, cfg, "enc");
  REQUIRE(msf.levels() == 7);
  const int res[] = {64, 32, 16, 8, 4, 2, 1};
  const int ch[] = {1, 16, 32, 64, 64, 64, 64};
  for (int l = 0; l < 7; ++l) {
    CHECK(msf.grids[l]->dim(0) == std::size_t(ch[l]));
    for (int a = 1; a <= 3; ++a) CHECK(msf.grids[l]->dim(a) == std::size_t(res[l]));
  }
  CHECK(cfg.feature_width() == 353);
  std::vector<double> pts{0.1, 0.2, 0.3, 0.9, 0.5, 0.4};
  CHECK(query_features(tape, msf, pts, cfg.pe_bands)->shape() == Shape{2, 353});

  CHECK_THROWS_AS(encode(tape, random_grid(1, 48, rng), store, cfg, "enc"), std::invalid_argument);
  CHECK_THROWS_AS(encode(tape, random_grid(2, 64, rng), store, cfg, "enc"), std::invalid_argument);
  EncoderConfig bad = cfg;
  bad.channels.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("encoder on an all-zero input stays finite") {
  std::mt19937_64 rng(2);
  EncoderConfig cfg{4, {4, 8, 8, 8}, 3, 1, 4};
  ParamStore store;
  init_encoder(store, cfg, "enc", rng);
  Tape tape;
  const auto msf = encode(tape, make_tensor({1, 16, 16, 16}), store, cfg, "enc");
  for (const auto& g : msf.grids)
    for (double v : g->data()) CHECK(std::isfinite(v));
}

TEST_CASE("encoder is deterministic") {
  EncoderConfig cfg{3, {4, 6, 8}, 3, 1, 4};
  std::mt19937_64 rng(3);
  auto input = random_grid(1, 16, rng);
  auto run = [&]() {
    std::mt19937_64 init(7);
    ParamStore store;
    init_encoder(store, cfg, "enc", init);
    Tape tape;
    return encode(tape, input, store, cfg, "enc").top()->to_vector();
  };
  CHECK(run() == run());
}

TEST_CASE("encoder gradient check on a 16^3 input") {
  std::mt19937_64 rng(4);
  EncoderConfig cfg{2, {3, 4}, 3, 1, 2};
  ParamStore store;
  init_encoder(store, cfg, "enc", rng);
  auto input = random_grid(1, 16, rng);
  std::vector<double> pts(3 * 20);
  for (auto& p : pts) p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  auto wts = std::make_shared<Tensor>(oracle::random_tensor({20, cfg.feature_width()}, rng));
  std::vector<TensorPtr> params;
  for (const auto& [name, slot] : store.slots()) params.push_back(slot.value);
  const double err = grad_check(
      [&](Tape& t) {
        const auto msf = encode(t, input, store, cfg, "enc");
        return sum(t, mul(t, query_features(t, msf, pts, cfg.pe_bands), wts));
      },
      params);
  CHECK(err < 1e-4);
}

TEST_CASE("positional embedding") {
  const std::vector<double> origin{0, 0, 0};
  const Tensor z = positional_embedding(origin, 8);
  CHECK(z.shape() == Shape{1, 48});
  for (int i = 0; i < 48; ++i) CHECK(z.data()[i] == (i % 2 ? 1.0 : 0.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<double> p{u(rng), u(rng), u(rng)};
  const Tensor e = positional_embedding(p, 6);
  double err = 0;
  int col = 0;
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 6; ++j) {
      const double f = std::pow(2.0, j) * std::numbers::pi * p[c];
      err = std::max(err, std::abs(e.data()[col++] - std::sin(f)));
      err = std::max(err, std::abs(e.data()[col++] - std::cos(f)));
    }
  CHECK(err <= 1e-15);
  CHECK_THROWS_AS(positional_embedding(p, 0), std::invalid_argument);
}

TEST_CASE("query_features layout and linearity") {
  std::mt19937_64 rng(6);
  EncoderConfig cfg{2, {2, 3}, 3, 1, 2};
  MultiScaleFeatures msf;
  msf.grids = {random_grid(1, 8, rng), random_grid(2, 4, rng), random_grid(3, 2, rng)};
  Tape tape;
  const std::vector<double> origin{0, 0, 0};
  const auto f = query_features(tape, msf, origin, cfg.pe_bands);
  REQUIRE(f->dim(1) == cfg.feature_width());
  std::size_t col = 0;
  for (const auto& g : msf.grids) {
    const std::size_t cells = g->numel() / g->dim(0);
    for (std::size_t c = 0; c < g->dim(0); ++c) CHECK(f->data()[col++] == g->data()[c * cells]);
  }

  std::vector<double> pts(3 * 10);
  for (auto& p : pts) p = std::uniform_real_distribution<double>(0, 1)(rng);
  MultiScaleFeatures twice = msf;
  for (auto& g : twice.grids) {
    auto d = std::make_shared<Tensor>(*g);
    for (auto& v : d->data()) v *= 2.0;
    g = d;
  }
  const auto a = query_features(tape, msf, pts, 2), b = query_features(tape, twice, pts, 2);
  const std::size_t w = a->dim(1), grid_cols = w - 12;
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      const double x = a->data()[r * w + c], y = b->data()[r * w + c];
      if (c < grid_cols) CHECK(y == 2.0 * x);
      else CHECK(y == x);
    }

  auto g0 = std::make_shared<Tensor>(*msf.grids[1]);
  g0->set_requires_grad(true);
  MultiScaleFeatures one = msf;
  one.grids[1] = g0;
  CHECK(grad_check([&](Tape& t) { auto q = query_features(t, one, pts, 2); return sum(t, mul(t, q, q)); }, {g0}) < 1e-4);
}

TEST_CASE("mlp") {
  std::mt19937_64 rng(8);
  ParamStore store;
  MlpSpec spec{"m", {5, 7, 3}};
  init_mlp(store, spec, rng, true);
  Tape tape;
  auto x = std::make_shared<Tensor>(oracle::random_tensor({4, 5}, rng));
  auto y = mlp_forward(tape, store, spec, x);
  CHECK(y->shape() == Shape{4, 3});
  for (double v : y->data()) CHECK(v == 0.0);
  CHECK_THROWS_AS(mlp_forward(tape, store, spec, make_tensor({4, 6})), std::invalid_argument);
}
