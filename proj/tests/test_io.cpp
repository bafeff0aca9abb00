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

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "voxood/errors.hpp"
#include "voxood/io.hpp"

using namespace voxood;
using namespace voxood::testing;
namespace fs = std::filesystem;

namespace {

std::vector<char> slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::vector<char>(std::istreambuf_iterator<char>(f),
                           std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  REQUIRE(f.good());
}

bool same_file_bytes(const fs::path& a, const fs::path& b) {
  return slurp(a) == slurp(b);
}

}  // namespace

TEST_CASE("label grids round trip bit-exact") {
  const fs::path dir = fresh_dir("io_labels");
  const GridMeta meta = small_meta(9, 7, 5);
  LabelGrid grid = LabelGrid::filled(meta, 0);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> u(0, 65535);
  for (std::uint16_t& label : grid.labels) {
    label = static_cast<std::uint16_t>(u(rng));
  }
  write_label_grid(grid, dir / "a.bin");
  const LabelGrid back = read_label_grid(dir / "a.bin");
  CHECK(back.meta == meta);
  CHECK(back.labels == grid.labels);
  write_label_grid(back, dir / "b.bin");
  CHECK(same_file_bytes(dir / "a.bin", dir / "b.bin"));
}

TEST_CASE("raw benchmark label layout is accepted with a fallback geometry") {
  const fs::path dir = fresh_dir("io_raw");
  const GridMeta meta = small_meta(4, 3, 2);
  std::vector<std::uint16_t> labels(meta.voxel_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::uint16_t>(i * 37 + 5);
  }
  // Little-endian u16 payload with no header, written by hand.
  std::string raw(labels.size() * 2, '\0');
  for (std::size_t i = 0; i < labels.size(); ++i) {
    raw[2 * i] = static_cast<char>(labels[i] & 0xFF);
    raw[2 * i + 1] = static_cast<char>(labels[i] >> 8);
  }
  spit(dir / "raw.bin", raw);

  const LabelGrid grid = read_label_grid(dir / "raw.bin", meta);
  CHECK(grid.meta == meta);
  CHECK(grid.labels == labels);

  // Size must match the geometry exactly.
  spit(dir / "short.bin", raw.substr(0, raw.size() - 2));
  CHECK_THROWS_AS(read_label_grid(dir / "short.bin", meta),
                  SizeMismatchError);
  // Raw files without a geometry hint cannot be interpreted.
  CHECK_THROWS_AS(read_label_grid(dir / "raw.bin"), FormatError);
}

TEST_CASE("logit volumes round trip with their class count") {
  const fs::path dir = fresh_dir("io_logits");
  const GridMeta meta = small_meta(5, 4, 3);
  const LogitVolume volume = random_logits(meta, 6, 2);
  write_logit_volume(volume, dir / "a.bin");
  const LogitVolume back = read_logit_volume(dir / "a.bin");
  CHECK(back.meta == meta);
  CHECK(back.num_classes == 6);
  REQUIRE(back.values.size() == volume.values.size());
  CHECK(std::memcmp(back.values.data(), volume.values.data(),
                    volume.values.size() * sizeof(float)) == 0);
  write_logit_volume(back, dir / "b.bin");
  CHECK(same_file_bytes(dir / "a.bin", dir / "b.bin"));
}

TEST_CASE("score and binary volumes round trip") {
  const fs::path dir = fresh_dir("io_scores");
  const GridMeta meta = small_meta(6, 5, 4);
  const ScoreVolume scores = random_scores(meta, 3);
  write_score_volume(scores, dir / "s.bin");
  const ScoreVolume s_back = read_score_volume(dir / "s.bin");
  CHECK(s_back.meta == meta);
  CHECK(std::memcmp(s_back.scores.data(), scores.scores.data(),
                    scores.scores.size() * sizeof(float)) == 0);

  BinaryVolume mask = BinaryVolume::zeros(meta);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 255);
  for (std::uint8_t& v : mask.values) v = static_cast<std::uint8_t>(u(rng));
  write_binary_volume(mask, dir / "m.bin");
  const BinaryVolume m_back = read_binary_volume(dir / "m.bin");
  CHECK(m_back.values == mask.values);  // arbitrary bytes preserved
}

TEST_CASE("mixing up volume dtypes is an error") {
  const fs::path dir = fresh_dir("io_dtype");
  const GridMeta meta = small_meta(3, 3, 3);
  write_score_volume(random_scores(meta, 5), dir / "s.bin");
  CHECK_THROWS_AS(read_label_grid(dir / "s.bin"), FormatError);
  CHECK_THROWS_AS(read_binary_volume(dir / "s.bin"), FormatError);
  CHECK_THROWS_AS(read_logit_volume(dir / "s.bin"), FormatError);
}

TEST_CASE("truncated and corrupted volume files are rejected") {
  const fs::path dir = fresh_dir("io_corrupt");
  const GridMeta meta = small_meta(4, 4, 2);
  write_score_volume(random_scores(meta, 6), dir / "s.bin");
  std::vector<char> bytes = slurp(dir / "s.bin");
  {
    std::ofstream f(dir / "cut.bin", std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 8));
  }
  CHECK_THROWS_AS(read_score_volume(dir / "cut.bin"), SizeMismatchError);
  bytes[0] = 'X';  // break the magic
  {
    std::ofstream f(dir / "bad.bin", std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(read_score_volume(dir / "bad.bin"), FormatError);
  CHECK_THROWS_AS(read_score_volume(dir / "nothere.bin"), MissingInputError);
}

TEST_CASE("depth rasters round trip with kind and bit patterns") {
  const fs::path dir = fresh_dir("io_depth");
  DepthMap depth;
  depth.width = 5;
  depth.height = 3;
  depth.kind = DepthKind::metric;
  depth.values.resize(15);
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    depth.values[i] = 0.25F * static_cast<float>(i) - 1.0F;
  }
  depth.values[7] = std::numeric_limits<float>::quiet_NaN();
  write_depth_raster(depth, dir / "d.bin");
  const DepthMap back = read_depth_raster(dir / "d.bin");
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.kind == DepthKind::metric);
  CHECK(std::memcmp(back.values.data(), depth.values.data(),
                    depth.values.size() * sizeof(float)) == 0);

  depth.kind = DepthKind::pseudo;
  write_depth_raster(depth, dir / "p.bin");
  CHECK(read_depth_raster(dir / "p.bin").kind == DepthKind::pseudo);
}

TEST_CASE("little-endian PFM files are read as pseudo depth, bottom-up") {
  const fs::path dir = fresh_dir("io_pfm");
  // 2x2 PFM stores the bottom row first; reading must flip to top-down.
  const float bottom[2] = {1.0F, 2.0F};
  const float top[2] = {3.0F, 4.0F};
  std::string data = "Pf\n2 2\n-1.0\n";
  data.append(reinterpret_cast<const char*>(bottom), 8);
  data.append(reinterpret_cast<const char*>(top), 8);
  spit(dir / "d.pfm", data);
  const DepthMap depth = read_depth_raster(dir / "d.pfm");
  CHECK(depth.kind == DepthKind::pseudo);
  CHECK(depth.width == 2);
  CHECK(depth.height == 2);
  CHECK(depth.at(0, 0) == 3.0F);
  CHECK(depth.at(1, 0) == 4.0F);
  CHECK(depth.at(0, 1) == 1.0F);
  CHECK(depth.at(1, 1) == 2.0F);
}

TEST_CASE("PGM masks round trip and tolerate comments") {
  const fs::path dir = fresh_dir("io_pgm");
  AnomalyMask2D mask;
  mask.width = 6;
  mask.height = 4;
  mask.mask.resize(24);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> u(0, 255);
  for (std::uint8_t& v : mask.mask) v = static_cast<std::uint8_t>(u(rng));
  write_mask(mask, dir / "m.pgm");
  const AnomalyMask2D back = read_mask(dir / "m.pgm");
  CHECK(back.width == 6);
  CHECK(back.height == 4);
  CHECK(back.mask == mask.mask);

  std::string pgm = "P5\n# a comment line\n 3 2\n# another\n255\n";
  pgm += std::string("\x00\x01\xFF\x00\x02\x00", 6);
  spit(dir / "c.pgm", pgm);
  const AnomalyMask2D commented = read_mask(dir / "c.pgm");
  CHECK(commented.width == 3);
  CHECK(commented.height == 2);
  CHECK(commented.at(1, 0));
  CHECK(commented.at(2, 0));
  CHECK_FALSE(commented.at(0, 0));
  CHECK(commented.at(1, 1));
}

TEST_CASE("calibration text round trips the camera exactly") {
  const fs::path dir = fresh_dir("io_calib");
  const CameraModel cam = make_forward_camera(Vec3(0.3, -1.25, 1.6));
  write_calib(cam, dir / "calib.txt");
  const CameraModel back = read_calib(dir / "calib.txt");
  CHECK((back.intrinsics - cam.intrinsics).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.rotation - cam.rotation).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.translation - cam.translation).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(back.image_size == cam.image_size);
}

TEST_CASE("driving-benchmark projection columns fold into the translation") {
  const fs::path dir = fresh_dir("io_kitti");
  // P2 with a nonzero fourth column: t gains K^-1 * column.
  spit(dir / "calib.txt",
       "P0: 100 0 64 0 0 100 48 0 0 0 1 0\n"
       "P2: 200 0 64 400 0 200 48 0 0 0 1 0\n"
       "Tr: 1 0 0 0.5 0 1 0 -0.25 0 0 1 2\n"
       "S: 128 96\n");
  const CameraModel cam = read_calib(dir / "calib.txt");
  // P2 wins over P0; fx = 200.
  CHECK(cam.intrinsics(0, 0) == 200.0);
  // K^-1 * (400, 0, 0) = (2, 0, 0); Tr already held (0.5, -0.25, 2).
  CHECK(cam.translation.x() == doctest::Approx(2.5));
  CHECK(cam.translation.y() == doctest::Approx(-0.25));
  CHECK(cam.translation.z() == doctest::Approx(2.0));
  CHECK(cam.image_size == Eigen::Vector2i(128, 96));

  spit(dir / "empty.txt", "nothing here\n");
  CHECK_THROWS_AS(read_calib(dir / "empty.txt"), FormatError);
  spit(dir / "shortp.txt", "P2: 1 2 3\n");
  CHECK_THROWS_AS(read_calib(dir / "shortp.txt"), FormatError);
}

TEST_CASE("point clouds round trip through packed f32 triplets") {
  const fs::path dir = fresh_dir("io_cloud");
  PointCloud cloud;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<float> u(-50.0F, 50.0F);
  for (int i = 0; i < 300; ++i) {
    cloud.points.emplace_back(u(rng), u(rng), u(rng));
  }
  write_point_cloud(cloud, dir / "c.bin");
  const PointCloud back = read_point_cloud(dir / "c.bin");
  REQUIRE(back.points.size() == 300);
  for (std::size_t i = 0; i < back.points.size(); ++i) {
    CHECK(back.points[i] == cloud.points[i]);  // values came from f32
  }
  spit(dir / "odd.bin", std::string(13, 'x'));
  CHECK_THROWS_AS(read_point_cloud(dir / "odd.bin"), SizeMismatchError);
}

TEST_CASE("partition JSON round trips and validates groups") {
  const fs::path dir = fresh_dir("io_partition");
  ClassPartition partition;
  partition.mapping[0] = ClassGroup::free_space;
  partition.mapping[1] = ClassGroup::instance;
  partition.mapping[9] = ClassGroup::region;
  partition.region_weight = 0.75;
  write_partition(partition, dir / "p.json");
  const ClassPartition back = read_partition(dir / "p.json");
  CHECK(back.region_weight == 0.75);
  CHECK(back.mapping == partition.mapping);

  spit(dir / "badgroup.json",
       R"({"classes": {"0": "free", "1": "vehicle"}})");
  CHECK_THROWS_AS(read_partition(dir / "badgroup.json"), ConfigError);
  spit(dir / "nofree.json", R"({"classes": {"1": "instance"}})");
  CHECK_THROWS_AS(read_partition(dir / "nofree.json"), ConfigError);
  spit(dir / "broken.json", "{not json");
  CHECK_THROWS_AS(read_partition(dir / "broken.json"), FormatError);
  spit(dir / "noclasses.json", R"({"region_weight": 0.5})");
  CHECK_THROWS_AS(read_partition(dir / "noclasses.json"), FormatError);
}

TEST_CASE("class means round trip with counts") {
  const fs::path dir = fresh_dir("io_means");
  ClassMeanLogits means;
  means.means[1] = Eigen::Vector3d(0.25, -1.5, 3.0);
  means.means[4] = Eigen::Vector3d(1.0, 2.0, -0.125);
  means.counts[1] = 42;
  means.counts[4] = 7;
  write_class_means(means, dir / "m.json");
  const ClassMeanLogits back = read_class_means(dir / "m.json");
  REQUIRE(back.has(1));
  REQUIRE(back.has(4));
  CHECK(back.counts.at(1) == 42);
  CHECK(back.counts.at(4) == 7);
  CHECK((back.means.at(1) - means.means.at(1)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.means.at(4) - means.means.at(4)).cwiseAbs().maxCoeff() == 0.0);

  spit(dir / "ragged.json", R"({"means": {"1": [1, 2], "2": [1, 2, 3]}})");
  CHECK_THROWS_AS(read_class_means(dir / "ragged.json"), FormatError);
}
