// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "texrecon/config.hpp"
#include "texrecon/report.hpp"

using namespace texrecon;

TEST_CASE("config defaults mirror the reference training setup") {
  const RunConfig cfg;
  CHECK(cfg.phase("shape").epochs == 40);
  CHECK(cfg.phase("shape").lr == 1e-4);
  CHECK(cfg.model.encoder.scales == 6);
  CHECK(cfg.model.resolution == 64);
  CHECK(cfg.model.voxel_samples == 100000);
  CHECK(cfg.phase("shape").sigmas == std::vector<double>{0.015, 0.2});
  CHECK(cfg.phase("shape").bce == BceWeighting::kInverseFrequency);
  CHECK(cfg.model.fusion_tau_voxels == 1.5);
  CHECK(cfg.model.thresholds.t1 == 2.5);
  CHECK(cfg.model.thresholds.t2 == 1.2);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config json round trip") {
  RunConfig cfg = RunConfig::from_json(R"({
    "mode": "body", "seed": 9,
    "dataset": {"bodies": 3, "splits": [0.5, 0.25, 0.25]},
    "model": {"resolution": 32, "encoder": {"scales": 5, "channels": [4, 4, 4, 4, 4]}},
    "train": {"epochs": 3},
    "phases": {"shape": {"lr": 0.001, "bce": "literal"}, "bbox": {"extra_partials": 2}},
    "ablate": "fusion"
  })");
  CHECK(cfg.mode == Mode::kBody);
  CHECK(cfg.phase("shape").epochs == 3);
  CHECK(cfg.phase("shape").lr == 0.001);
  CHECK(cfg.phase("shape").bce == BceWeighting::kLiteral);
  CHECK(cfg.phase("pose").lr == 1e-4);
  CHECK(cfg.phase("bbox").extra_partials == 2);
  CHECK_FALSE(cfg.ablation.fusion);
  const RunConfig back = RunConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.hash() == cfg.hash());
  CHECK(back.dataset_hash() == cfg.dataset_hash());
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(RunConfig::from_json(R"({"sed": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"model": {"encoder": {"chanels": [1]}}})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"phases": {"colour": {}}})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"model": {"resolution": 48}})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"train": {"epochs": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"train": {"bce": "magic"}})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"phases": {"bbox": {"extra_partials": -1}}})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"ablate": "everything"})"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"seed": "one"})"), std::invalid_argument);
}

TEST_CASE("config hash tracks training settings only") {
  const RunConfig base;
  RunConfig c = base;
  c.output_dir = "elsewhere";
  c.dataset.output_dir = "other-data";
  c.mode = Mode::kBody;
  c.model.thresholds.t1 = 9;
  c.model.fusion_tau_voxels = 3;
  c.ablation.fusion = false;
  c.ablation.filter = false;
  CHECK(c.hash() == base.hash());
  CHECK(c.dataset_hash() == base.dataset_hash());
  c.ablation.prior = false;
  CHECK(c.hash() != base.hash());
  RunConfig d = base;
  d.dataset.bodies = 9;
  CHECK(d.hash() != base.hash());
  CHECK(d.dataset_hash() != base.dataset_hash());
  RunConfig e = base;
  e.phases["shape"].lr = 0.5;
  CHECK(e.hash() != base.hash());
  CHECK(e.dataset_hash() == base.dataset_hash());
}

TEST_CASE("ablation lists") {
  const Ablation a = Ablation::from_list("prior,fusion");
  CHECK_FALSE(a.prior);
  CHECK_FALSE(a.fusion);
  CHECK(a.bbox);
  CHECK(a.to_list() == "prior,fusion");
  CHECK(Ablation::from_list("").to_list().empty());
}

TEST_CASE("report") {
  std::vector<EvalRow> rows{
      {"a", "object", "full", 0.1, 0.8, 12.5, true},
      {"b", "body", "full", 0.3, std::nullopt, 10.0, true},
      {"a", "object", "no-fusion", 0.2, 0.7, std::nullopt, false},
  };
  const auto s = summarize(rows);
  REQUIRE(s.size() == 2);
  CHECK(s[0].arm == "full");
  CHECK(s[0].cases == 2);
  CHECK(s[0].chamfer == doctest::Approx(0.2));
  CHECK(*s[0].iou == doctest::Approx(0.8));
  CHECK(*s[0].texture_mae == doctest::Approx(11.25));
  CHECK_FALSE(s[1].texture_mae);

  std::string hash;
  const auto back = parse_report_csv(report_csv(rows, "abc123"), &hash);
  CHECK(hash == "abc123");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].id == rows[i].id);
    CHECK(back[i].kind == rows[i].kind);
    CHECK(back[i].arm == rows[i].arm);
    CHECK(back[i].chamfer == rows[i].chamfer);
    CHECK(back[i].iou == rows[i].iou);
    CHECK(back[i].texture_mae == rows[i].texture_mae);
    CHECK(back[i].completion_ran == rows[i].completion_ran);
  }

  std::vector<EvalRow> twin = rows;
  for (auto& r : twin) r.arm = r.arm == "full" ? "copy" : "skip";
  std::vector<EvalRow> both{rows[0], rows[1], twin[0], twin[1]};
  const auto ss = summarize(both);
  CHECK(ss[0].chamfer == ss[1].chamfer);
  CHECK(ss[0].iou == ss[1].iou);
  CHECK(ss[0].texture_mae == ss[1].texture_mae);

  CHECK(report_summary(rows).find("no-fusion") != std::string::npos);
  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
  CHECK_THROWS_AS(parse_report_csv("nonsense\n"), std::invalid_argument);
}
