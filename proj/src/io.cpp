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
#include "voxood/io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "voxood/errors.hpp"

namespace voxood {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::array<char, 8> kVolumeMagic = {'O', 'C', 'C', 'O',
                                              'O', 'D', 'V', '1'};
constexpr std::array<char, 8> kDepthMagic = {'O', 'C', 'C', 'O',
                                             'O', 'D', 'D', '1'};
constexpr std::size_t kVolumeHeaderBytes = 60;
constexpr std::size_t kDepthHeaderBytes = 20;

enum class Dtype : std::uint32_t { labels = 1, scores = 2, logits = 3, mask = 4 };

std::ifstream open_input(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw MissingInputError("cannot open input file: " + path.string());
  }
  return f;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error("cannot open output file: " + path.string());
  }
  return f;
}

std::uint64_t file_bytes(const fs::path& path) {
  std::error_code ec;
  const std::uintmax_t n = fs::file_size(path, ec);
  if (ec) {
    throw MissingInputError("cannot stat input file: " + path.string());
  }
  return static_cast<std::uint64_t>(n);
}

void put_u32(char* out, std::uint32_t v) {
  out[0] = static_cast<char>(v & 0xFF);
  out[1] = static_cast<char>((v >> 8) & 0xFF);
  out[2] = static_cast<char>((v >> 16) & 0xFF);
  out[3] = static_cast<char>((v >> 24) & 0xFF);
}

std::uint32_t get_u32(const char* in) {
  const auto b = [&](int i) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(in[i]));
  };
  return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

void put_f64(char* out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  }
}

double get_f64(const char* in) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i]))
            << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

template <typename T>
void write_payload_le(std::ofstream& f, const T* data, std::size_t n) {
  static_assert(sizeof(T) == 1 || sizeof(T) == 2 || sizeof(T) == 4);
  if constexpr (sizeof(T) == 1) {
    f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
  } else if (std::endian::native == std::endian::little) {
    f.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(T)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      char buf[sizeof(T)];
      std::memcpy(buf, &data[i], sizeof(T));
      for (std::size_t b = 0; b < sizeof(T) / 2; ++b) {
        std::swap(buf[b], buf[sizeof(T) - 1 - b]);
      }
      f.write(buf, sizeof(T));
    }
  }
}

template <typename T>
void read_payload_le(std::ifstream& f, T* data, std::size_t n,
                     const fs::path& path) {
  static_assert(sizeof(T) == 1 || sizeof(T) == 2 || sizeof(T) == 4);
  f.read(reinterpret_cast<char*>(data),
         static_cast<std::streamsize>(n * sizeof(T)));
  if (static_cast<std::size_t>(f.gcount()) != n * sizeof(T)) {
    throw SizeMismatchError("short read from " + path.string());
  }
  if constexpr (sizeof(T) > 1) {
    if (std::endian::native != std::endian::little) {
      for (std::size_t i = 0; i < n; ++i) {
        char buf[sizeof(T)];
        std::memcpy(buf, &data[i], sizeof(T));
        for (std::size_t b = 0; b < sizeof(T) / 2; ++b) {
          std::swap(buf[b], buf[sizeof(T) - 1 - b]);
        }
        std::memcpy(&data[i], buf, sizeof(T));
      }
    }
  }
}

struct VolumeHeader {
  Dtype dtype;
  GridMeta meta;
  std::uint32_t num_classes;
};

std::size_t dtype_size(Dtype d) {
  switch (d) {
    case Dtype::labels:
      return 2;
    case Dtype::scores:
    case Dtype::logits:
      return 4;
    case Dtype::mask:
      return 1;
  }
  return 0;
}

std::uint64_t payload_bytes(const VolumeHeader& h) {
  return static_cast<std::uint64_t>(h.meta.voxel_count()) * h.num_classes *
         dtype_size(h.dtype);
}

void write_volume_header(std::ofstream& f, const VolumeHeader& h) {
  char buf[kVolumeHeaderBytes];
  std::memcpy(buf, kVolumeMagic.data(), 8);
  put_u32(buf + 8, static_cast<std::uint32_t>(h.dtype));
  put_u32(buf + 12, static_cast<std::uint32_t>(h.meta.dims.x()));
  put_u32(buf + 16, static_cast<std::uint32_t>(h.meta.dims.y()));
  put_u32(buf + 20, static_cast<std::uint32_t>(h.meta.dims.z()));
  put_u32(buf + 24, h.num_classes);
  put_f64(buf + 28, h.meta.voxel_size);
  put_f64(buf + 36, h.meta.origin.x());
  put_f64(buf + 44, h.meta.origin.y());
  put_f64(buf + 52, h.meta.origin.z());
  f.write(buf, kVolumeHeaderBytes);
}

VolumeHeader parse_volume_header(const char* buf, const fs::path& path) {
  if (std::memcmp(buf, kVolumeMagic.data(), 8) != 0) {
    throw FormatError("bad magic in " + path.string() +
                      " (expected OCCOODV1)");
  }
  const std::uint32_t code = get_u32(buf + 8);
  if (code < 1 || code > 4) {
    throw FormatError("unknown dtype code " + std::to_string(code) + " in " +
                      path.string());
  }
  VolumeHeader h;
  h.dtype = static_cast<Dtype>(code);
  h.meta.dims = Vec3i(static_cast<int>(get_u32(buf + 12)),
                      static_cast<int>(get_u32(buf + 16)),
                      static_cast<int>(get_u32(buf + 20)));
  h.num_classes = get_u32(buf + 24);
  h.meta.voxel_size = get_f64(buf + 28);
  h.meta.origin =
      Vec3(get_f64(buf + 36), get_f64(buf + 44), get_f64(buf + 52));
  h.meta.validate();
  if (h.num_classes < 1) {
    throw FormatError("class count must be >= 1 in " + path.string());
  }
  if (h.dtype != Dtype::logits && h.num_classes != 1) {
    throw FormatError("non-logit volume must carry class count 1 in " +
                      path.string());
  }
  if (payload_bytes(h) > kMaxPayloadBytes) {
    throw FormatError("header of " + path.string() + " implies " +
                      std::to_string(payload_bytes(h)) +
                      " payload bytes, over the " +
                      std::to_string(kMaxPayloadBytes) + " byte cap");
  }
  return h;
}

VolumeHeader read_volume_header(std::ifstream& f, const fs::path& path,
                                Dtype expected) {
  char buf[kVolumeHeaderBytes];
  f.read(buf, kVolumeHeaderBytes);
  if (static_cast<std::size_t>(f.gcount()) != kVolumeHeaderBytes) {
    throw FormatError("file too short for a volume header: " + path.string());
  }
  VolumeHeader h = parse_volume_header(buf, path);
  if (h.dtype != expected) {
    throw FormatError("dtype code " +
                      std::to_string(static_cast<std::uint32_t>(h.dtype)) +
                      " in " + path.string() + " does not match the reader");
  }
  const std::uint64_t expected_bytes = kVolumeHeaderBytes + payload_bytes(h);
  const std::uint64_t actual = file_bytes(path);
  if (actual != expected_bytes) {
    throw SizeMismatchError(path.string() + ": expected " +
                            std::to_string(expected_bytes) +
                            " bytes, found " + std::to_string(actual));
  }
  return h;
}

/// Reads one PNM token, skipping whitespace and # comments.
std::string pnm_token(std::istream& f, const fs::path& path) {
  std::string token;
  int c = f.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = f.get();
    } else if (std::isspace(c) != 0) {
      c = f.get();
    } else {
      break;
    }
  }
  while (c != EOF && std::isspace(c) == 0 && c != '#') {
    token.push_back(static_cast<char>(c));
    c = f.get();
  }
  if (token.empty()) {
    throw FormatError("truncated header in " + path.string());
  }
  return token;
}

int pnm_int(std::istream& f, const fs::path& path, const char* what) {
  const std::string token = pnm_token(f, path);
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw FormatError(std::string("bad ") + what + " field '" + token +
                      "' in " + path.string());
  }
}

DepthMap read_pfm(std::ifstream& f, const fs::path& path) {
  const std::string magic = pnm_token(f, path);
  if (magic == "PF") {
    throw FormatError("color PFM is not supported: " + path.string());
  }
  if (magic != "Pf") {
    throw FormatError("bad PFM magic in " + path.string());
  }
  const int width = pnm_int(f, path, "width");
  const int height = pnm_int(f, path, "height");
  const std::string scale_token = pnm_token(f, path);
  double scale = 0.0;
  try {
    scale = std::stod(scale_token);
  } catch (const std::exception&) {
    throw FormatError("bad PFM scale '" + scale_token + "' in " +
                      path.string());
  }
  if (width < 1 || height < 1 || scale == 0.0) {
    throw FormatError("bad PFM dimensions or scale in " + path.string());
  }
  if (static_cast<std::uint64_t>(width) * height * 4 > kMaxPayloadBytes) {
    throw FormatError("PFM payload over the size cap: " + path.string());
  }
  // The header ends with exactly one whitespace byte, already consumed by
  // the token reader. Rows are stored bottom-up.
  DepthMap depth;
  depth.width = width;
  depth.height = height;
  depth.kind = DepthKind::pseudo;
  depth.values.assign(static_cast<std::size_t>(width) * height, 0.0F);
  const bool little = scale < 0.0;
  std::vector<float> row(static_cast<std::size_t>(width));
  for (int y = height - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * 4));
    if (static_cast<std::size_t>(f.gcount()) != row.size() * 4) {
      throw SizeMismatchError("short PFM payload in " + path.string());
    }
    if (little != (std::endian::native == std::endian::little)) {
      for (float& v : row) {
        char buf[4];
        std::memcpy(buf, &v, 4);
        std::swap(buf[0], buf[3]);
        std::swap(buf[1], buf[2]);
        std::memcpy(&v, buf, 4);
      }
    }
    std::memcpy(depth.values.data() + static_cast<std::size_t>(y) * width,
                row.data(), row.size() * 4);
  }
  return depth;
}

std::uint16_t parse_class_id(const std::string& key, const fs::path& path) {
  try {
    std::size_t used = 0;
    const unsigned long value = std::stoul(key, &used);
    if (used != key.size() || value > 0xFFFF) throw std::out_of_range(key);
    return static_cast<std::uint16_t>(value);
  } catch (const std::exception&) {
    throw FormatError("bad class ID '" + key + "' in " + path.string());
  }
}

json parse_json_file(const fs::path& path) {
  std::ifstream f = open_input(path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

void write_label_grid(const LabelGrid& grid, const fs::path& path) {
  grid.validate();
  std::ofstream f = open_output(path);
  write_volume_header(f, {Dtype::labels, grid.meta, 1});
  write_payload_le(f, grid.labels.data(), grid.labels.size());
  if (!f) throw Error("write failed: " + path.string());
}

LabelGrid read_label_grid(const fs::path& path,
                          const std::optional<GridMeta>& fallback_meta) {
  std::ifstream f = open_input(path);
  char magic[8] = {};
  f.read(magic, 8);
  const bool headered = static_cast<std::size_t>(f.gcount()) == 8 &&
                        std::memcmp(magic, kVolumeMagic.data(), 8) == 0;

  LabelGrid grid;
  if (headered) {
    f.seekg(0);
    const VolumeHeader h = read_volume_header(f, path, Dtype::labels);
    grid.meta = h.meta;
  } else if (fallback_meta.has_value()) {
    fallback_meta->validate();
    const std::uint64_t expected =
        static_cast<std::uint64_t>(fallback_meta->voxel_count()) * 2;
    const std::uint64_t actual = file_bytes(path);
    if (actual != expected) {
      throw SizeMismatchError(path.string() + ": raw label layout expects " +
                              std::to_string(expected) + " bytes, found " +
                              std::to_string(actual));
    }
    if (expected > kMaxPayloadBytes) {
      throw FormatError("raw label payload over the size cap: " +
                        path.string());
    }
    f.seekg(0);
    grid.meta = *fallback_meta;
  } else {
    throw FormatError("bad magic in " + path.string() +
                      " (expected OCCOODV1; supply a fallback grid geometry "
                      "for raw label files)");
  }
  grid.labels.resize(static_cast<std::size_t>(grid.meta.voxel_count()));
  read_payload_le(f, grid.labels.data(), grid.labels.size(), path);
  return grid;
}

void write_logit_volume(const LogitVolume& volume, const fs::path& path) {
  volume.validate();
  std::ofstream f = open_output(path);
  write_volume_header(f, {Dtype::logits, volume.meta, volume.num_classes});
  write_payload_le(f, volume.values.data(), volume.values.size());
  if (!f) throw Error("write failed: " + path.string());
}

LogitVolume read_logit_volume(const fs::path& path) {
  std::ifstream f = open_input(path);
  const VolumeHeader h = read_volume_header(f, path, Dtype::logits);
  LogitVolume volume;
  volume.meta = h.meta;
  volume.num_classes = h.num_classes;
  volume.values.resize(static_cast<std::size_t>(h.meta.voxel_count()) *
                       h.num_classes);
  read_payload_le(f, volume.values.data(), volume.values.size(), path);
  volume.validate();
  return volume;
}

void write_score_volume(const ScoreVolume& volume, const fs::path& path) {
  volume.validate();
  std::ofstream f = open_output(path);
  write_volume_header(f, {Dtype::scores, volume.meta, 1});
  write_payload_le(f, volume.scores.data(), volume.scores.size());
  if (!f) throw Error("write failed: " + path.string());
}

ScoreVolume read_score_volume(const fs::path& path) {
  std::ifstream f = open_input(path);
  const VolumeHeader h = read_volume_header(f, path, Dtype::scores);
  ScoreVolume volume;
  volume.meta = h.meta;
  volume.scores.resize(static_cast<std::size_t>(h.meta.voxel_count()));
  read_payload_le(f, volume.scores.data(), volume.scores.size(), path);
  volume.validate();
  return volume;
}

void write_binary_volume(const BinaryVolume& volume, const fs::path& path) {
  volume.validate();
  std::ofstream f = open_output(path);
  write_volume_header(f, {Dtype::mask, volume.meta, 1});
  write_payload_le(f, volume.values.data(), volume.values.size());
  if (!f) throw Error("write failed: " + path.string());
}

BinaryVolume read_binary_volume(const fs::path& path) {
  std::ifstream f = open_input(path);
  const VolumeHeader h = read_volume_header(f, path, Dtype::mask);
  BinaryVolume volume;
  volume.meta = h.meta;
  volume.values.resize(static_cast<std::size_t>(h.meta.voxel_count()));
  read_payload_le(f, volume.values.data(), volume.values.size(), path);
  return volume;
}

void write_depth_raster(const DepthMap& depth, const fs::path& path) {
  depth.validate();
  std::ofstream f = open_output(path);
  char buf[kDepthHeaderBytes];
  std::memcpy(buf, kDepthMagic.data(), 8);
  put_u32(buf + 8, static_cast<std::uint32_t>(depth.width));
  put_u32(buf + 12, static_cast<std::uint32_t>(depth.height));
  put_u32(buf + 16, depth.kind == DepthKind::metric ? 1 : 0);
  f.write(buf, kDepthHeaderBytes);
  write_payload_le(f, depth.values.data(), depth.values.size());
  if (!f) throw Error("write failed: " + path.string());
}

DepthMap read_depth_raster(const fs::path& path) {
  std::ifstream f = open_input(path);
  char probe[2] = {};
  f.read(probe, 2);
  if (static_cast<std::size_t>(f.gcount()) == 2 && probe[0] == 'P' &&
      (probe[1] == 'f' || probe[1] == 'F')) {
    f.seekg(0);
    return read_pfm(f, path);
  }
  f.seekg(0);
  char buf[kDepthHeaderBytes];
  f.read(buf, kDepthHeaderBytes);
  if (static_cast<std::size_t>(f.gcount()) != kDepthHeaderBytes ||
      std::memcmp(buf, kDepthMagic.data(), 8) != 0) {
    throw FormatError("bad magic in " + path.string() +
                      " (expected OCCOODD1 or PFM)");
  }
  DepthMap depth;
  depth.width = static_cast<int>(get_u32(buf + 8));
  depth.height = static_cast<int>(get_u32(buf + 12));
  const std::uint32_t kind = get_u32(buf + 16);
  if (depth.width < 1 || depth.height < 1 || kind > 1) {
    throw FormatError("bad depth raster header in " + path.string());
  }
  depth.kind = kind == 1 ? DepthKind::metric : DepthKind::pseudo;
  const std::uint64_t payload =
      static_cast<std::uint64_t>(depth.width) * depth.height * 4;
  if (payload > kMaxPayloadBytes) {
    throw FormatError("depth payload over the size cap: " + path.string());
  }
  const std::uint64_t expected = kDepthHeaderBytes + payload;
  const std::uint64_t actual = file_bytes(path);
  if (actual != expected) {
    throw SizeMismatchError(path.string() + ": expected " +
                            std::to_string(expected) + " bytes, found " +
                            std::to_string(actual));
  }
  depth.values.resize(static_cast<std::size_t>(depth.width) * depth.height);
  read_payload_le(f, depth.values.data(), depth.values.size(), path);
  return depth;
}

void write_mask(const AnomalyMask2D& mask, const fs::path& path) {
  mask.validate();
  std::ofstream f = open_output(path);
  f << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(mask.mask.data()),
          static_cast<std::streamsize>(mask.mask.size()));
  if (!f) throw Error("write failed: " + path.string());
}

AnomalyMask2D read_mask(const fs::path& path) {
  std::ifstream f = open_input(path);
  const std::string magic = pnm_token(f, path);
  if (magic != "P5") {
    throw FormatError("bad PGM magic '" + magic + "' in " + path.string());
  }
  AnomalyMask2D mask;
  mask.width = pnm_int(f, path, "width");
  mask.height = pnm_int(f, path, "height");
  const int maxval = pnm_int(f, path, "maxval");
  if (mask.width < 1 || mask.height < 1) {
    throw FormatError("bad PGM dimensions in " + path.string());
  }
  if (maxval < 1 || maxval > 255) {
    throw FormatError("PGM maxval " + std::to_string(maxval) +
                      " unsupported (need 1..255) in " + path.string());
  }
  // Exactly one whitespace byte separates maxval from the payload; the token
  // reader consumed it.
  const std::size_t count =
      static_cast<std::size_t>(mask.width) * mask.height;
  mask.mask.resize(count);
  f.read(reinterpret_cast<char*>(mask.mask.data()),
         static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(f.gcount()) != count) {
    throw SizeMismatchError("short PGM payload in " + path.string() +
                            ": expected " + std::to_string(count) + " bytes");
  }
  return mask;
}

CameraModel read_calib(const fs::path& path) {
  std::ifstream f = open_input(path);
  std::map<std::string, std::vector<double>> records;
  std::string line;
  while (std::getline(f, line)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    std::istringstream rest(line.substr(colon + 1));
    std::vector<double> values;
    double v = 0.0;
    while (rest >> v) values.push_back(v);
    if (!key.empty() && !values.empty()) records[key] = values;
  }

  const std::vector<double>* proj = nullptr;
  for (const char* key : {"P2", "P", "P0"}) {
    const auto it = records.find(key);
    if (it != records.end()) {
      proj = &it->second;
      break;
    }
  }
  if (proj == nullptr) {
    throw FormatError("calibration file lacks a projection line (P2/P/P0): " +
                      path.string());
  }
  if (proj->size() != 12) {
    throw FormatError("projection line must hold 12 values (3x4) in " +
                      path.string());
  }

  CameraModel cam;
  Eigen::Matrix<double, 3, 4> p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      p(r, c) = (*proj)[static_cast<std::size_t>(r) * 4 + c];
    }
  }
  cam.intrinsics = p.leftCols<3>();
  cam.rotation = Eigen::Matrix3d::Identity();
  cam.translation = Vec3::Zero();

  const std::vector<double>* extr = nullptr;
  for (const char* key : {"Tr", "Tr_velo_to_cam"}) {
    const auto it = records.find(key);
    if (it != records.end()) {
      extr = &it->second;
      break;
    }
  }
  if (extr != nullptr) {
    if (extr->size() != 12 && extr->size() != 16) {
      throw FormatError("extrinsic line must hold 12 or 16 values in " +
                        path.string());
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        cam.rotation(r, c) = (*extr)[static_cast<std::size_t>(r) * 4 + c];
      }
      cam.translation[r] = (*extr)[static_cast<std::size_t>(r) * 4 + 3];
    }
  }
  // The projection's fourth column is a pre-multiplied offset K*b; fold it
  // into the extrinsic translation.
  cam.translation += cam.intrinsics.inverse() * p.col(3);

  const auto size_it = records.find("S");
  if (size_it != records.end()) {
    if (size_it->second.size() != 2) {
      throw FormatError("image size line must hold 'width height' in " +
                        path.string());
    }
    cam.image_size = Eigen::Vector2i(static_cast<int>(size_it->second[0]),
                                     static_cast<int>(size_it->second[1]));
  }
  cam.validate();
  return cam;
}

void write_calib(const CameraModel& cam, const fs::path& path) {
  cam.validate();
  std::ofstream f = open_output(path);
  f << std::setprecision(17);
  f << "P2:";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) f << " " << cam.intrinsics(r, c);
    f << " " << 0.0;
  }
  f << "\nTr:";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) f << " " << cam.rotation(r, c);
    f << " " << cam.translation[r];
  }
  f << "\n";
  if (cam.image_size.x() > 0 && cam.image_size.y() > 0) {
    f << "S: " << cam.image_size.x() << " " << cam.image_size.y() << "\n";
  }
  if (!f) throw Error("write failed: " + path.string());
}

PointCloud read_point_cloud(const fs::path& path) {
  std::ifstream f = open_input(path);
  const std::uint64_t actual = file_bytes(path);
  if (actual % 12 != 0) {
    throw SizeMismatchError(path.string() + ": point cloud bytes (" +
                            std::to_string(actual) +
                            ") are not a multiple of 12");
  }
  if (actual > kMaxPayloadBytes) {
    throw FormatError("point cloud over the size cap: " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(actual / 12);
  std::vector<float> raw(n * 3);
  read_payload_le(f, raw.data(), raw.size(), path);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.emplace_back(static_cast<double>(raw[3 * i]),
                              static_cast<double>(raw[3 * i + 1]),
                              static_cast<double>(raw[3 * i + 2]));
  }
  return cloud;
}

void write_point_cloud(const PointCloud& cloud, const fs::path& path) {
  cloud.validate();
  std::ofstream f = open_output(path);
  std::vector<float> raw;
  raw.reserve(cloud.points.size() * 3);
  for (const Vec3& p : cloud.points) {
    raw.push_back(static_cast<float>(p.x()));
    raw.push_back(static_cast<float>(p.y()));
    raw.push_back(static_cast<float>(p.z()));
  }
  write_payload_le(f, raw.data(), raw.size());
  if (!f) throw Error("write failed: " + path.string());
}

ClassPartition read_partition(const fs::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_object() || !doc.contains("classes") ||
      !doc["classes"].is_object()) {
    throw FormatError("partition file needs a 'classes' object: " +
                      path.string());
  }
  ClassPartition partition;
  if (doc.contains("region_weight")) {
    if (!doc["region_weight"].is_number()) {
      throw FormatError("'region_weight' must be a number in " +
                        path.string());
    }
    partition.region_weight = doc["region_weight"].get<double>();
  }
  for (const auto& [key, value] : doc["classes"].items()) {
    const std::uint16_t cls = parse_class_id(key, path);
    if (!value.is_string()) {
      throw FormatError("group for class " + key + " must be a string in " +
                        path.string());
    }
    const std::string group = value.get<std::string>();
    if (group == "instance") {
      partition.mapping[cls] = ClassGroup::instance;
    } else if (group == "region") {
      partition.mapping[cls] = ClassGroup::region;
    } else if (group == "free") {
      partition.mapping[cls] = ClassGroup::free_space;
    } else {
      throw ConfigError("unknown class group '" + group + "' for class " +
                        key + " in " + path.string() +
                        " (expected instance|region|free)");
    }
  }
  partition.validate();
  return partition;
}

void write_partition(const ClassPartition& partition, const fs::path& path) {
  partition.validate();
  json classes = json::object();
  for (const auto& [cls, group] : partition.mapping) {
    const char* name = group == ClassGroup::instance ? "instance"
                       : group == ClassGroup::region ? "region"
                                                     : "free";
    classes[std::to_string(cls)] = name;
  }
  json doc;
  doc["region_weight"] = partition.region_weight;
  doc["classes"] = classes;
  std::ofstream f = open_output(path);
  f << doc.dump(2) << "\n";
  if (!f) throw Error("write failed: " + path.string());
}

ClassMeanLogits read_class_means(const fs::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_object() || !doc.contains("means") || !doc["means"].is_object()) {
    throw FormatError("class means file needs a 'means' object: " +
                      path.string());
  }
  ClassMeanLogits means;
  Eigen::Index length = -1;
  for (const auto& [key, value] : doc["means"].items()) {
    const std::uint16_t cls = parse_class_id(key, path);
    if (!value.is_array()) {
      throw FormatError("mean for class " + key + " must be an array in " +
                        path.string());
    }
    Eigen::VectorXd vec(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!value[i].is_number()) {
        throw FormatError("mean for class " + key +
                          " must hold numbers in " + path.string());
      }
      vec[static_cast<Eigen::Index>(i)] = value[i].get<double>();
    }
    if (length >= 0 && vec.size() != length) {
      throw FormatError("mean vectors disagree in length in " + path.string());
    }
    length = vec.size();
    means.means[cls] = std::move(vec);
    means.counts[cls] = 0;
  }
  if (doc.contains("counts")) {
    if (!doc["counts"].is_object()) {
      throw FormatError("'counts' must be an object in " + path.string());
    }
    for (const auto& [key, value] : doc["counts"].items()) {
      const std::uint16_t cls = parse_class_id(key, path);
      if (!value.is_number_integer()) {
        throw FormatError("count for class " + key +
                          " must be an integer in " + path.string());
      }
      if (means.means.count(cls) != 0) {
        means.counts[cls] = value.get<std::int64_t>();
      }
    }
  }
  return means;
}

void write_class_means(const ClassMeanLogits& means, const fs::path& path) {
  json mean_obj = json::object();
  json count_obj = json::object();
  for (const auto& [cls, vec] : means.means) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < vec.size(); ++i) arr.push_back(vec[i]);
    mean_obj[std::to_string(cls)] = std::move(arr);
    const auto it = means.counts.find(cls);
    count_obj[std::to_string(cls)] = it != means.counts.end() ? it->second : 0;
  }
  json doc;
  doc["means"] = mean_obj;
  doc["counts"] = count_obj;
  std::ofstream f = open_output(path);
  f << doc.dump(2) << "\n";
  if (!f) throw Error("write failed: " + path.string());
}

}  // namespace voxood
