// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "texrecon/mesh.hpp"
#include "texrecon/synthetic.hpp"

namespace fs = std::filesystem;
using texrecon::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& root, const std::string& extra = "") {
  fs::create_directories(root);
  const fs::path p = root / "config.json";
  std::ofstream f(p);
  f << R"({
  "mode": "object", "seed": 2,
  "output_dir": ")" << (root / "run").generic_string() << R"(",
  "dataset": {"dir": ")" << (root / "data").generic_string() << R"(",
              "bodies": 0, "objects": 4, "seed": 2, "splits": [1, 0, 0], "object_resolution": 40},
  "model": {"resolution": 16, "encoder": {"scales": 2, "channels": [4, 4], "pe_bands": 2},
            "head_hidden": [8], "decoder_hidden": [16], "voxel_samples": 10000)"
    << extra << R"(},
  "train": {"epochs": 1, "lr": 0.001, "queries": 128}
})";
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"explode"}).code == 2);
  CHECK(call({"train", "--phase", "shape"}).code == 2);
  CHECK(call({"grad-check", "--bogus"}).code == 2);
  const fs::path root = fs::temp_directory_path() / "texrecon_cli_usage";
  const fs::path cfg = write_config(root);
  CHECK(call({"train", "--config", cfg.string(), "--phase", "colour"}).code == 2);
  CHECK(call({"train", "--config", cfg.string(), "--phase", "pose"}).code == 2);
  CHECK(call({"train", "--config", cfg.string(), "--phase", "shape", "--mode", "plant"}).code == 2);
  CHECK(call({"train", "--config", cfg.string(), "--phase", "shape", "--ablate", "nothing"}).code == 2);
  const fs::path bad = write_config(root / "bad", R"(, "colour": 1)");
  const Result r = call({"gen-data", "--config", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("colour") != std::string::npos);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("gen-data, train, infer and eval") {
  const fs::path root = fs::temp_directory_path() / "texrecon_cli_flow";
  fs::remove_all(root);
  const std::string cfg = write_config(root).string();
  REQUIRE(call({"gen-data", "--config", cfg}).code == 0);
  const std::string manifest = slurp(root / "data" / "manifest.jsonl");
  REQUIRE(call({"gen-data", "--config", cfg}).code == 0);
  CHECK(slurp(root / "data" / "manifest.jsonl") == manifest);

  const Result t = call({"train", "--config", cfg, "--phase", "all"});
  REQUIRE(t.code == 0);
  for (const char* p : {"object-bbox", "object-shape", "object-texture"}) {
    CHECK(fs::exists(root / "run" / "checkpoints" / (std::string(p) + ".ckpt")));
    CHECK(fs::exists(root / "run" / "checkpoints" / (std::string(p) + ".loss.csv")));
  }

  const auto m = texrecon::read_manifest(root / "data" / "manifest.jsonl");
  const fs::path gt = m.resolve(m.entries[0].gt_path);
  const fs::path out = root / "out" / "complete.obj";
  // Thresholds that no box can exceed make every scan count as complete.
  const std::string never = write_config(root / "never", R"(, "thresholds": {"t1": 1e9, "t2": 1e9})").string();
  std::string text = slurp(never);
  text.replace(text.find(R"("output_dir": ")") + 15, (root / "never" / "run").generic_string().size(),
               (root / "run").generic_string());
  text.replace(text.find(R"("dir": ")") + 8, (root / "never" / "data").generic_string().size(),
               (root / "data").generic_string());
  std::ofstream(never) << text;
  const Result inf = call({"infer", "--config", never, "--input", gt.string(), "--output", out.string()});
  REQUIRE(inf.code == 0);
  CHECK(inf.out.find("passed through") != std::string::npos);
  texrecon::save_mesh(texrecon::load_mesh(gt), root / "out" / "resaved.obj");
  CHECK(slurp(out) == slurp(root / "out" / "resaved.obj"));

  const Result ev = call({"eval", "--config", cfg, "--split", "train", "--compare", "fusion;filter"});
  REQUIRE(ev.code == 0);
  CHECK(ev.out.find("full") != std::string::npos);
  CHECK(ev.out.find("no-fusion") != std::string::npos);
  const std::string report = slurp(root / "run" / "report-train.csv");
  CHECK(report.rfind("# config_hash=", 0) == 0);

  CHECK(call({"infer", "--config", cfg, "--input", (root / "missing.obj").string(), "--output", out.string()}).code == 1);
  CHECK(call({"infer", "--config", cfg, "--mode", "body", "--input", gt.string(), "--output", out.string()}).code == 1);
}

TEST_CASE("grad-check") {
  const Result r = call({"grad-check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("conv3d") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
