/* Copyright 2026 The Voxood Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "voxood/io.hpp"
#include "voxood/pipeline.hpp"
#include "voxood/report.hpp"

using namespace voxood;
using namespace voxood::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& stderr_file = {}) {
  std::string cmd = std::string(VOXOOD_CLI_PATH) + " " + args;
  if (!stderr_file.empty()) {
    cmd += " 2> " + stderr_file.string();
  } else {
    cmd += " 2> /dev/null";
  }
  cmd += " > /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return json::parse(f);
}

std::vector<char> slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::vector<char>(std::istreambuf_iterator<char>(f),
                           std::istreambuf_iterator<char>());
}

struct CliFixture {
  fs::path dir;
  GridMeta meta;
  json base_config;

  explicit CliFixture(const std::string& name)
      : dir(fresh_dir(name)), meta(small_meta(40, 40, 16)) {
    // Scene: ground plane only, everything else free.
    LabelGrid scene = LabelGrid::filled(meta, 0);
    for (int j = 0; j < meta.dims.y(); ++j) {
      for (int i = 0; i < meta.dims.x(); ++i) {
        scene.at(Vec3i(i, j, 0)) = 9;
      }
    }
    write_label_grid(scene, dir / "scene.bin");

    const CameraModel cam = make_forward_camera(Vec3(0.5, 4.0, 1.0));
    write_calib(cam, dir / "calib.txt");

    // Pseudo depth varies smoothly over the image; the true metric distance
    // of every point is 2 * pseudo + 1.
    DepthMap pseudo;
    pseudo.width = 640;
    pseudo.height = 480;
    pseudo.kind = DepthKind::pseudo;
    pseudo.values.resize(640 * 480);
    for (int y = 0; y < 480; ++y) {
      for (int x = 0; x < 640; ++x) {
        pseudo.at(x, y) = 1.0F + static_cast<float>(x) / 640.0F +
                          static_cast<float>(y) / 480.0F;
      }
    }
    write_depth_raster(pseudo, dir / "depth.bin");

    PointCloud cloud;
    for (int y = 40; y < 440; y += 16) {
      for (int x = 40; x < 600; x += 16) {
        const double d = 2.0 * static_cast<double>(pseudo.at(x, y)) + 1.0;
        cloud.points.push_back(
            back_project_pixel(cam, Eigen::Vector2d(x, y), d));
      }
    }
    write_point_cloud(cloud, dir / "cloud.bin");

    AnomalyMask2D mask;
    mask.width = 640;
    mask.height = 480;
    mask.mask.assign(640 * 480, 0);
    for (int y = 250; y < 266; ++y) {
      for (int x = 200; x < 216; ++x) {
        mask.mask[static_cast<std::size_t>(y) * 640 + x] = 255;
      }
    }
    write_mask(mask, dir / "mask.pgm");

    const LogitVolume logits = random_logits(meta, 4, 2024);
    write_logit_volume(logits, dir / "logits.bin");

    ClassPartition partition;
    partition.mapping[0] = ClassGroup::free_space;
    partition.mapping[1] = ClassGroup::instance;
    partition.mapping[2] = ClassGroup::instance;
    partition.mapping[3] = ClassGroup::region;
    write_partition(partition, dir / "partition.json");

    base_config["output_dir"] = (dir / "out").string();
    base_config["scene"] = (dir / "scene.bin").string();
    base_config["depth"] = (dir / "depth.bin").string();
    base_config["mask"] = (dir / "mask.pgm").string();
    base_config["calib"] = (dir / "calib.txt").string();
    base_config["cloud"] = (dir / "cloud.bin").string();
    base_config["logits"] = (dir / "logits.bin").string();
    base_config["partition"] = (dir / "partition.json").string();
    base_config["dataset"] = "cli_toy";
    base_config["sample_count"] = 600;
    base_config["seed"] = 7;
  }

  fs::path write_config(const json& extra, const std::string& name) const {
    json cfg = base_config;
    for (const auto& [key, value] : extra.items()) cfg[key] = value;
    const fs::path path = dir / name;
    std::ofstream f(path, std::ios::trunc);
    f << cfg.dump(2);
    return path;
  }
};

}  // namespace

TEST_CASE("inject, score, eval, and report chain end to end") {
  CliFixture fx("cli_chain");
  const fs::path cfg = fx.write_config({}, "config.json");
  const std::string base = "--config " + cfg.string();

  REQUIRE(run_cli("inject " + base) == 0);
  const LabelGrid injected =
      read_label_grid(fx.dir / "out" / "injected.bin");
  std::int64_t anomalies = 0;
  for (const std::uint16_t label : injected.labels) {
    anomalies += label == 20;
  }
  CHECK(anomalies > 0);

  const json inject_diag = read_json(fx.dir / "out" / "injected.json");
  CHECK(inject_diag["visibility"]["visible"].get<int>() > 0);
  CHECK(inject_diag["pairs"]["used"].get<int>() > 100);
  CHECK(inject_diag["svr"]["max_abs_residual"].get<double>() < 0.2);

  REQUIRE(run_cli("score " + base) == 0);
  const ScoreVolume scores = read_score_volume(fx.dir / "out" / "scores.bin");
  CHECK(scores.meta == fx.meta);

  // Evaluate the scores against the injected grid's anomaly labels.
  const fs::path eval_cfg = fx.write_config(
      {{"scores", (fx.dir / "out" / "scores.bin").string()},
       {"gt", (fx.dir / "out" / "injected.bin").string()},
       {"method", "semantic_aware"}},
      "eval.json.cfg");
  REQUIRE(run_cli("eval --config " + eval_cfg.string()) == 0);
  const std::vector<EvalRow> rows =
      read_eval_csv(fx.dir / "out" / "eval.csv");
  REQUIRE(rows.size() == 3);  // default radii 4, 5, 6 voxels
  CHECK(rows[0].radius_m == doctest::Approx(0.8));
  CHECK(rows[1].radius_m == doctest::Approx(1.0));
  CHECK(rows[2].radius_m == doctest::Approx(1.2));
  CHECK(rows[0].method == "semantic_aware");
  CHECK(rows[0].dataset == "cli_toy");

  const json eval_doc = read_json(fx.dir / "out" / "eval.json");
  REQUIRE(eval_doc["frames"].size() == 1);
  CHECK(eval_doc["frames"][0]["curves"].contains("roc"));
  CHECK(eval_doc["frames"][0]["curves"].contains("pr_r4"));

  REQUIRE(run_cli("report " + (fx.dir / "out" / "eval.csv").string() +
                  " --out-dir " + (fx.dir / "out").string() + " --curves " +
                  (fx.dir / "out" / "eval.json").string()) == 0);
  const std::vector<EvalRow> agg =
      read_eval_csv(fx.dir / "out" / "aggregate.csv");
  CHECK(agg.size() == 3);
  std::ifstream table(fx.dir / "out" / "table.txt");
  std::string text((std::istreambuf_iterator<char>(table)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("cli_toy") != std::string::npos);
  CHECK(text.find("semantic_aware") != std::string::npos);
  CHECK(fs::exists(fx.dir / "out" / "curves_eval_f0_roc.csv"));
}

TEST_CASE("scoring reruns are byte-identical") {
  CliFixture fx("cli_determinism");
  const fs::path cfg1 = fx.write_config(
      {{"output_dir", (fx.dir / "o1").string()}}, "c1.json");
  const fs::path cfg2 = fx.write_config(
      {{"output_dir", (fx.dir / "o2").string()}}, "c2.json");
  REQUIRE(run_cli("score --config " + cfg1.string()) == 0);
  REQUIRE(run_cli("score --config " + cfg2.string()) == 0);
  CHECK(slurp(fx.dir / "o1" / "scores.bin") ==
        slurp(fx.dir / "o2" / "scores.bin"));
}

TEST_CASE("frame lists fan out under --jobs deterministically") {
  CliFixture fx("cli_jobs");
  json frames = json::array();
  for (int i = 0; i < 3; ++i) {
    frames.push_back({{"score_output", "scores_" + std::to_string(i) + ".bin"},
                      {"score_json", "scores_" + std::to_string(i) + ".json"}});
  }
  const fs::path cfg = fx.write_config({{"frames", frames}}, "cfg.json");
  REQUIRE(run_cli("score --config " + cfg.string() + " --jobs 3") == 0);
  for (int i = 0; i < 3; ++i) {
    CHECK(fs::exists(fx.dir / "out" /
                     ("scores_" + std::to_string(i) + ".bin")));
  }
  // All frames share inputs here, so their outputs must agree bytewise.
  CHECK(slurp(fx.dir / "out" / "scores_0.bin") ==
        slurp(fx.dir / "out" / "scores_2.bin"));
}

TEST_CASE("missing inputs exit 2 with a machine-readable error") {
  CliFixture fx("cli_missing");
  const fs::path cfg =
      fx.write_config({{"scene", (fx.dir / "nope.bin").string()}}, "cfg.json");
  const fs::path err = fx.dir / "err.json";
  CHECK(run_cli("inject --config " + cfg.string(), err) == 2);
  const json doc = read_json(err);
  CHECK(doc["error"]["type"] == "missing_input");
  CHECK(doc["error"]["exit_code"] == 2);
  CHECK(doc["error"]["message"].get<std::string>().find("nope.bin") !=
        std::string::npos);
}

TEST_CASE("configuration problems exit 3") {
  CliFixture fx("cli_config");
  const fs::path broken = fx.dir / "broken.json";
  {
    std::ofstream f(broken);
    f << "{ not json";
  }
  CHECK(run_cli("score --config " + broken.string()) == 3);

  const fs::path cfg =
      fx.write_config({{"method", "prophecy"}}, "cfg.json");
  const fs::path err = fx.dir / "err.json";
  CHECK(run_cli("score --config " + cfg.string(), err) == 3);
  CHECK(read_json(err)["error"]["type"] == "config_error");
}

TEST_CASE("an anomaly-free ground truth exits 4") {
  CliFixture fx("cli_undefined");
  REQUIRE(run_cli("score --config " +
                  fx.write_config({}, "score.json.cfg").string()) == 0);
  const fs::path cfg = fx.write_config(
      {{"scores", (fx.dir / "out" / "scores.bin").string()},
       {"gt", (fx.dir / "scene.bin").string()}},  // no class-20 voxels
      "eval.cfg");
  const fs::path err = fx.dir / "err.json";
  CHECK(run_cli("eval --config " + cfg.string(), err) == 4);
  CHECK(read_json(err)["error"]["type"] == "metric_undefined");
}

TEST_CASE("report without inputs exits 5") {
  CliFixture fx("cli_empty");
  const fs::path cfg = fx.write_config({}, "cfg.json");
  const fs::path err = fx.dir / "err.json";
  CHECK(run_cli("report --config " + cfg.string(), err) == 5);
  CHECK(read_json(err)["error"]["type"] == "empty_aggregation");
}

TEST_CASE("the out-dir environment variable supplies the default sink") {
  CliFixture fx("cli_env");
  json cfg = fx.base_config;
  cfg.erase("output_dir");
  const fs::path path = fx.dir / "cfg.json";
  {
    std::ofstream f(path);
    f << cfg.dump();
  }
  const fs::path envdir = fx.dir / "envout";
  setenv("VOXOOD_OUT_DIR", envdir.string().c_str(), 1);
  const int code = run_cli("score --config " + path.string());
  unsetenv("VOXOOD_OUT_DIR");
  CHECK(code == 0);
  CHECK(fs::exists(envdir / "scores.bin"));
}
