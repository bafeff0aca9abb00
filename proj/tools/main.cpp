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
//
// voxood: batch front-end for anomaly injection, OoD scoring, and regional
// evaluation on semantic occupancy grids.
//
// Subcommands: inject, score, eval, report. Options come from a JSON config
// (--config) with command-line flags taking precedence; list-valued work
// ("frames") can fan out over --jobs worker threads, with each frame
// processed sequentially so reruns are byte-identical.
//
// Exit codes: 0 success, 1 generic failure, 2 missing input, 3 config or
// schema error, 4 metric undefined on the given data, 5 empty aggregation.
// Failures emit one machine-readable JSON object on stderr.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "voxood/camera.hpp"
#include "voxood/depth.hpp"
#include "voxood/errors.hpp"
#include "voxood/grid.hpp"
#include "voxood/io.hpp"
#include "voxood/metrics.hpp"
#include "voxood/pipeline.hpp"
#include "voxood/point_cloud.hpp"
#include "voxood/report.hpp"
#include "voxood/scoring.hpp"
#include "voxood/svr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace voxood;

namespace {

// ---------------------------------------------------------------- config --

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) {
    throw MissingInputError("cannot open config file: " + path);
  }
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config JSON in " + path + ": " + e.what());
  }
}

/// Shallow merge: keys of `over` replace keys of `base`.
json merge(const json& base, const json& over) {
  json out = base.is_object() ? base : json::object();
  if (over.is_object()) {
    for (const auto& [key, value] : over.items()) out[key] = value;
  }
  return out;
}

template <typename T>
T get_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key) || cfg[key].is_null()) return fallback;
  try {
    return cfg[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::string require_path(const json& cfg, const std::string& key) {
  const std::string value = get_or<std::string>(cfg, key, "");
  if (value.empty()) {
    throw ConfigError("config key '" + key + "' is required");
  }
  return value;
}

std::string output_dir(const json& cfg) {
  std::string dir = get_or<std::string>(cfg, "output_dir", "");
  if (dir.empty()) {
    if (const char* env = std::getenv("VOXOOD_OUT_DIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  return dir;
}

fs::path resolve_output(const json& cfg, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute()) return p;
  const fs::path dir(output_dir(cfg));
  fs::create_directories(dir);
  return dir / p;
}

std::optional<GridMeta> grid_from_config(const json& cfg) {
  if (!cfg.contains("grid") || cfg["grid"].is_null()) return std::nullopt;
  const json& g = cfg["grid"];
  GridMeta meta;
  const auto dims = get_or<std::vector<int>>(g, "dims",
                                             {meta.dims.x(), meta.dims.y(),
                                              meta.dims.z()});
  if (dims.size() != 3) {
    throw ConfigError("config grid.dims must hold three integers");
  }
  meta.dims = Vec3i(dims[0], dims[1], dims[2]);
  meta.voxel_size = get_or<double>(g, "voxel_size", meta.voxel_size);
  const auto origin = get_or<std::vector<double>>(
      g, "origin", {meta.origin.x(), meta.origin.y(), meta.origin.z()});
  if (origin.size() != 3) {
    throw ConfigError("config grid.origin must hold three numbers");
  }
  meta.origin = Vec3(origin[0], origin[1], origin[2]);
  meta.validate();
  return meta;
}

SvrHyper svr_from_config(const json& cfg) {
  SvrHyper hyper;
  if (cfg.contains("svr") && cfg["svr"].is_object()) {
    const json& s = cfg["svr"];
    hyper.c_reg = get_or<double>(s, "c_reg", hyper.c_reg);
    hyper.epsilon = get_or<double>(s, "epsilon", hyper.epsilon);
    hyper.gamma = get_or<double>(s, "gamma", hyper.gamma);
    hyper.tolerance = get_or<double>(s, "tolerance", hyper.tolerance);
    hyper.max_iterations =
        get_or<std::int64_t>(s, "max_iterations", hyper.max_iterations);
  }
  return hyper;
}

std::vector<json> frames_from_config(const json& cfg) {
  std::vector<json> frames;
  if (cfg.contains("frames") && cfg["frames"].is_array() &&
      !cfg["frames"].empty()) {
    for (const json& frame : cfg["frames"]) {
      if (!frame.is_object()) {
        throw ConfigError("config 'frames' entries must be objects");
      }
      frames.push_back(merge(cfg, frame));
    }
  } else {
    frames.push_back(cfg);
  }
  return frames;
}

/// Runs fn(0..count-1) on up to `jobs` workers; rethrows the first failure.
void parallel_frames(std::size_t count, int jobs,
                     const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void write_json_file(const json& doc, const fs::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open output file: " + path.string());
  f << doc.dump(2) << "\n";
  if (!f) throw Error("write failed: " + path.string());
}

std::string sibling_json_name(const std::string& output_name) {
  fs::path p(output_name);
  p.replace_extension(".json");
  return p.string();
}

// ---------------------------------------------------------------- inject --

void run_inject(const json& cfg) {
  const std::optional<GridMeta> fallback = grid_from_config(cfg);
  const LabelGrid scene_input =
      read_label_grid(require_path(cfg, "scene"), fallback);
  LabelGrid scene = scene_input;
  scene.free_class =
      static_cast<std::uint16_t>(get_or<int>(cfg, "free_class", 0));
  scene.anomaly_class =
      static_cast<std::uint16_t>(get_or<int>(cfg, "anomaly_class", 20));
  const DepthMap pseudo = read_depth_raster(require_path(cfg, "depth"));
  const AnomalyMask2D mask = read_mask(require_path(cfg, "mask"));
  const CameraModel cam = read_calib(require_path(cfg, "calib"));
  const PointCloud cloud = read_point_cloud(require_path(cfg, "cloud"));

  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const std::size_t sample_count =
      get_or<std::size_t>(cfg, "sample_count", 2048);
  const PointCloud sampled = sample_points(cloud, sample_count, seed);

  // Depth pairs: each sampled cloud point that lands on a valid pseudo-depth
  // pixel pairs that pixel's value with the point's camera distance.
  std::vector<DepthPair> pairs;
  std::int64_t skipped_projection = 0;
  std::int64_t skipped_pair_depth = 0;
  for (const Vec3& p : sampled.points) {
    const auto projection = try_project_point(cam, p);
    if (!projection.has_value()) {
      ++skipped_projection;
      continue;
    }
    const int u = static_cast<int>(std::lround(projection->pixel.x()));
    const int v = static_cast<int>(std::lround(projection->pixel.y()));
    if (u < 0 || u >= pseudo.width || v < 0 || v >= pseudo.height) {
      ++skipped_projection;
      continue;
    }
    const float value = pseudo.at(u, v);
    if (!DepthMap::valid_value(value)) {
      ++skipped_pair_depth;
      continue;
    }
    pairs.push_back({static_cast<double>(value), projection->distance});
  }

  SvrFitReport svr_report;
  const SvrModel model =
      fit_depth_alignment(pairs, svr_from_config(cfg), &svr_report);
  const DepthMap aligned = apply_depth_alignment(model, pseudo);
  const LiftResult lifted = lift_mask_to_points(mask, aligned, cam);
  const VoxelizeResult voxels = voxelize_points(lifted.points, scene.meta);

  IntegrateOptions options;
  options.ray.scale = get_or<double>(cfg, "scale", 2.0);
  options.camera_margin_voxels =
      get_or<double>(cfg, "camera_margin_voxels", 64.0);
  options.write_occluded = get_or<bool>(cfg, "write_occluded", false);
  const IntegrationResult result =
      integrate_with_occlusion(scene, voxels.voxels, cam, options);

  const std::string grid_name =
      get_or<std::string>(cfg, "injected_output", "injected.bin");
  const fs::path grid_path = resolve_output(cfg, grid_name);
  write_label_grid(result.grid, grid_path);

  json diag;
  diag["seed"] = seed;
  diag["sample_count"] = sample_count;
  diag["pairs"] = {{"sampled", sampled.points.size()},
                   {"used", pairs.size()},
                   {"skipped_projection", skipped_projection},
                   {"skipped_invalid_depth", skipped_pair_depth}};
  diag["svr"] = {{"iterations", svr_report.iterations},
                 {"kkt_gap", svr_report.kkt_gap},
                 {"dual_objective", svr_report.dual_objective},
                 {"support_count", svr_report.support_count},
                 {"max_abs_residual", svr_report.max_abs_residual},
                 {"mean_abs_residual", svr_report.mean_abs_residual},
                 {"bias", model.bias},
                 {"gamma", model.gamma},
                 {"epsilon", model.epsilon},
                 {"c_reg", model.c_reg}};
  diag["lift"] = {{"points", lifted.points.points.size()},
                  {"skipped_invalid_depth", lifted.skipped_invalid_depth}};
  diag["voxelize"] = {{"voxels", voxels.voxels.size()},
                      {"out_of_range", voxels.out_of_range}};
  diag["visibility"] = {{"visible", result.visible_count},
                        {"occluded", result.occluded_count}};
  diag["outputs"] = {{"grid", grid_name}};
  const std::string diag_name = get_or<std::string>(
      cfg, "inject_json", sibling_json_name(grid_name));
  write_json_file(diag, resolve_output(cfg, diag_name));
}

// ----------------------------------------------------------------- score --

void run_score_frame(const json& cfg) {
  const LogitVolume logits = read_logit_volume(require_path(cfg, "logits"));
  const std::string method = get_or<std::string>(cfg, "method", "semantic_aware");
  const bool use_prior = get_or<bool>(cfg, "use_geometry_prior", true);

  ScoringDiagnostics diagnostics;
  ScoreVolume scores;
  if (method == "semantic_aware") {
    ClassPartition partition = read_partition(require_path(cfg, "partition"));
    if (cfg.contains("region_weight") && !cfg["region_weight"].is_null()) {
      partition.region_weight = cfg["region_weight"].get<double>();
    }
    ClassMeanLogits external;
    ScoringOptions options;
    options.use_geometry_prior = use_prior;
    const std::string means_path = get_or<std::string>(cfg, "class_means", "");
    if (!means_path.empty()) {
      external = read_class_means(means_path);
      options.external_means = &external;
    }
    scores = semantic_aware_score(logits, partition, options, &diagnostics);
  } else if (method == "entropy" || method == "energy" ||
             method == "posterior") {
    std::uint16_t free_class =
        static_cast<std::uint16_t>(get_or<int>(cfg, "free_class", 0));
    const std::string partition_path = get_or<std::string>(cfg, "partition", "");
    if (!partition_path.empty()) {
      free_class = read_partition(partition_path).free_class();
    }
    const BaselineMethod baseline = method == "entropy"
                                        ? BaselineMethod::entropy
                                        : method == "energy"
                                              ? BaselineMethod::energy
                                              : BaselineMethod::posterior;
    scores = baseline_score_volume(logits, baseline, use_prior, free_class,
                                   &diagnostics);
  } else {
    throw ConfigError("unknown scoring method '" + method +
                      "' (expected semantic_aware|entropy|energy|posterior)");
  }

  const std::string score_name =
      get_or<std::string>(cfg, "score_output", "scores.bin");
  write_score_volume(scores, resolve_output(cfg, score_name));

  json diag;
  diag["method"] = method;
  diag["use_geometry_prior"] = use_prior;
  diag["occupied_count"] = diagnostics.occupied_count;
  diag["zero_norm_cosine"] = diagnostics.zero_norm_cosine;
  diag["missing_mean_fallbacks"] = diagnostics.missing_mean_fallbacks;
  diag["empty_occupancy"] = diagnostics.empty_occupancy;
  diag["degenerate_range"] = diagnostics.degenerate_range;
  diag["outputs"] = {{"scores", score_name}};
  const std::string diag_name = get_or<std::string>(
      cfg, "score_json", sibling_json_name(score_name));
  write_json_file(diag, resolve_output(cfg, diag_name));
}

void run_score(const json& cfg, int jobs) {
  const std::vector<json> frames = frames_from_config(cfg);
  parallel_frames(frames.size(), jobs,
                  [&](std::size_t i) { run_score_frame(frames[i]); });
}

// ------------------------------------------------------------------ eval --

/// Ground-truth anomalies come either from a mask-dtype binary volume or
/// from a label grid (headered or raw) whose anomaly_class voxels are the
/// positives.
BinaryVolume read_gt_anomaly(const json& cfg, const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) {
    throw MissingInputError("cannot open input file: " + path);
  }
  char head[12] = {};
  probe.read(head, 12);
  const bool headered = probe.gcount() == 12 &&
                        std::string(head, 8) == "OCCOODV1";
  bool is_mask = false;
  if (headered) {
    const auto code = static_cast<unsigned char>(head[8]);
    is_mask = code == 4;
  }
  probe.close();
  if (is_mask) {
    return read_binary_volume(path);
  }
  const LabelGrid grid = read_label_grid(path, grid_from_config(cfg));
  const auto anomaly_class =
      static_cast<std::uint16_t>(get_or<int>(cfg, "anomaly_class", 20));
  BinaryVolume gt = BinaryVolume::zeros(grid.meta);
  for (std::size_t v = 0; v < grid.labels.size(); ++v) {
    gt.values[v] = grid.labels[v] == anomaly_class;
  }
  return gt;
}

RegionalSemantics semantics_from_config(const json& cfg) {
  const std::string name = get_or<std::string>(cfg, "semantics", "tolerant");
  if (name == "tolerant") return RegionalSemantics::tolerant;
  if (name == "dilated_plain") return RegionalSemantics::dilated_plain;
  throw ConfigError("unknown regional semantics '" + name +
                    "' (expected tolerant|dilated_plain)");
}

json curve_to_json(const std::vector<std::pair<double, double>>& points) {
  json arr = json::array();
  for (const auto& [x, y] : points) arr.push_back(json::array({x, y}));
  return arr;
}

struct FrameEval {
  std::vector<EvalRow> rows;
  json report;
};

FrameEval eval_frame(const json& cfg) {
  const ScoreVolume scores = read_score_volume(require_path(cfg, "scores"));
  const BinaryVolume gt = read_gt_anomaly(cfg, require_path(cfg, "gt"));

  EvalMask mask;
  const std::string mask_path = get_or<std::string>(cfg, "eval_mask", "");
  if (!mask_path.empty()) {
    mask = read_binary_volume(mask_path);
  } else {
    mask = BinaryVolume::zeros(scores.meta);
    std::fill(mask.values.begin(), mask.values.end(), 1);
  }

  const std::string method = get_or<std::string>(cfg, "method", "semantic_aware");
  const std::string dataset = get_or<std::string>(cfg, "dataset", "default");
  const auto radii = get_or<std::vector<int>>(cfg, "radii_voxels", {4, 5, 6});
  if (radii.empty()) {
    throw ConfigError("config 'radii_voxels' must name at least one radius");
  }
  const RegionalSemantics semantics = semantics_from_config(cfg);
  const std::size_t cap = get_or<std::size_t>(cfg, "curve_sample_cap",
                                              kDefaultCurveSampleCap);

  const double area_roc = auroc(scores, gt, mask);
  const RocCurve roc = roc_curve(scores, gt, mask);

  std::optional<double> iou;
  std::optional<double> miou;
  const std::string pred_grid_path = get_or<std::string>(cfg, "pred_grid", "");
  const std::string gt_grid_path = get_or<std::string>(cfg, "gt_grid", "");
  if (!pred_grid_path.empty() && !gt_grid_path.empty()) {
    const std::optional<GridMeta> fallback = grid_from_config(cfg);
    LabelGrid pred = read_label_grid(pred_grid_path, fallback);
    LabelGrid gt_grid = read_label_grid(gt_grid_path, fallback);
    const auto free_class =
        static_cast<std::uint16_t>(get_or<int>(cfg, "free_class", 0));
    pred.free_class = free_class;
    gt_grid.free_class = free_class;
    iou = occupancy_iou(pred, gt_grid, mask).value;
    auto classes = get_or<std::vector<int>>(cfg, "classes", {});
    if (classes.empty()) {
      std::vector<bool> seen(1 << 16, false);
      for (const std::uint16_t label : gt_grid.labels) seen[label] = true;
      for (int c = 0; c < (1 << 16); ++c) {
        if (seen[static_cast<std::size_t>(c)] && c != free_class) {
          classes.push_back(c);
        }
      }
    }
    std::vector<std::uint16_t> class_ids;
    class_ids.reserve(classes.size());
    for (const int c : classes) {
      class_ids.push_back(static_cast<std::uint16_t>(c));
    }
    miou = semantic_miou(pred, gt_grid, class_ids, mask).miou;
  }

  FrameEval out;
  json curves;
  {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(roc.points.size());
    for (const RocPoint& p : roc.points) pts.emplace_back(p.fpr, p.tpr);
    curves["roc"] = curve_to_json(decimate_curve(pts, cap));
  }
  json results = json::array();
  for (const int radius : radii) {
    const PrCurve pr = auprc_regional(scores, gt, radius, mask, semantics);
    EvalRow row;
    row.method = method;
    row.dataset = dataset;
    row.radius_m = radius * scores.meta.voxel_size;
    row.auprc_r = pr.area;
    row.auroc = area_roc;
    row.iou = iou;
    row.miou = miou;
    out.rows.push_back(row);

    std::vector<std::pair<double, double>> pts;
    pts.reserve(pr.points.size());
    for (const PrPoint& p : pr.points) pts.emplace_back(p.recall, p.precision);
    const std::string curve_name = "pr_r" + std::to_string(radius);
    curves[curve_name] = curve_to_json(decimate_curve(pts, cap));
    results.push_back({{"radius_voxels", radius},
                       {"radius_m", row.radius_m},
                       {"auprc_r", pr.area}});
  }

  out.report["scores"] = get_or<std::string>(cfg, "scores", "");
  out.report["method"] = method;
  out.report["dataset"] = dataset;
  out.report["semantics"] =
      semantics == RegionalSemantics::tolerant ? "tolerant" : "dilated_plain";
  out.report["auroc"] = area_roc;
  out.report["results"] = results;
  if (iou) out.report["iou"] = *iou;
  if (miou) out.report["miou"] = *miou;
  out.report["curve_sample_cap"] = cap;
  out.report["curves"] = curves;
  return out;
}

void run_eval(const json& cfg, int jobs) {
  const std::vector<json> frames = frames_from_config(cfg);
  std::vector<FrameEval> evaluated(frames.size());
  parallel_frames(frames.size(), jobs,
                  [&](std::size_t i) { evaluated[i] = eval_frame(frames[i]); });

  std::vector<EvalRow> rows;
  json frame_reports = json::array();
  for (const FrameEval& frame : evaluated) {
    rows.insert(rows.end(), frame.rows.begin(), frame.rows.end());
    frame_reports.push_back(frame.report);
  }

  const std::string csv_name = get_or<std::string>(cfg, "eval_csv", "eval.csv");
  write_eval_csv(rows, resolve_output(cfg, csv_name));

  json doc;
  doc["frames"] = frame_reports;
  const std::string json_name =
      get_or<std::string>(cfg, "eval_json", "eval.json");
  write_json_file(doc, resolve_output(cfg, json_name));
}

// ---------------------------------------------------------------- report --

void run_report(const json& cfg, const std::vector<std::string>& cli_inputs) {
  std::vector<std::string> inputs = cli_inputs;
  if (inputs.empty()) {
    inputs = get_or<std::vector<std::string>>(cfg, "report_inputs", {});
  }
  if (inputs.empty()) {
    throw EmptyAggregationError("report: no input CSV files given");
  }
  std::vector<EvalRow> rows;
  for (const std::string& path : inputs) {
    const std::vector<EvalRow> frame_rows = read_eval_csv(path);
    rows.insert(rows.end(), frame_rows.begin(), frame_rows.end());
  }
  const std::vector<EvalRow> aggregated = aggregate_rows(rows);

  const std::string csv_name =
      get_or<std::string>(cfg, "report_csv", "aggregate.csv");
  write_eval_csv(aggregated, resolve_output(cfg, csv_name));

  const std::string table = format_pivot(aggregated);
  const std::string table_name =
      get_or<std::string>(cfg, "report_table", "table.txt");
  {
    const fs::path path = resolve_output(cfg, table_name);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open output file: " + path.string());
    f << table;
  }
  std::cout << table;

  // Optional plot-ready re-export of curves from eval JSON reports.
  const auto curve_reports =
      get_or<std::vector<std::string>>(cfg, "report_curves", {});
  for (const std::string& report_path : curve_reports) {
    std::ifstream f(report_path);
    if (!f) {
      throw MissingInputError("cannot open input file: " + report_path);
    }
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::exception& e) {
      throw ConfigError("malformed eval report JSON in " + report_path + ": " +
                        e.what());
    }
    const std::string stem = fs::path(report_path).stem().string();
    if (!doc.contains("frames") || !doc["frames"].is_array()) continue;
    for (std::size_t i = 0; i < doc["frames"].size(); ++i) {
      const json& frame = doc["frames"][i];
      if (!frame.contains("curves") || !frame["curves"].is_object()) continue;
      for (const auto& [name, samples] : frame["curves"].items()) {
        const std::string csv = "curves_" + stem + "_f" + std::to_string(i) +
                                "_" + name + ".csv";
        const fs::path path = resolve_output(cfg, csv);
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw Error("cannot open output file: " + path.string());
        out << "x,y\n";
        out.precision(17);
        for (const json& sample : samples) {
          if (sample.is_array() && sample.size() == 2) {
            out << sample[0].get<double>() << "," << sample[1].get<double>()
                << "\n";
          }
        }
      }
    }
  }
}

// ------------------------------------------------------------------ main --

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const MissingInputError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const FormatError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const SizeMismatchError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const MetricUndefinedError*>(&e) != nullptr) return 4;
  if (dynamic_cast<const EmptyAggregationError*>(&e) != nullptr) return 5;
  return 1;
}

const char* error_type_name(int code) {
  switch (code) {
    case 2:
      return "missing_input";
    case 3:
      return "config_error";
    case 4:
      return "metric_undefined";
    case 5:
      return "empty_aggregation";
    default:
      return "error";
  }
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    json err;
    err["error"] = {{"type", error_type_name(code)},
                    {"message", e.what()},
                    {"exit_code", code}};
    std::cerr << err.dump() << std::endl;
    return code;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomaly injection, OoD scoring, and regional evaluation for "
               "semantic occupancy grids"};
  app.require_subcommand(1);
  // Let `voxood score --config x.json` resolve --config/--jobs on the parent.
  app.fallthrough();

  std::string config_path;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON config file")
      ->envname("VOXOOD_CONFIG");
  app.add_option("--jobs", jobs, "Parallel frame workers")->check(CLI::PositiveNumber);

  // Flag overrides; only flags the user actually passed replace config keys.
  std::map<std::string, std::string> string_overrides;
  std::map<std::string, double> number_overrides;
  std::map<std::string, std::vector<int>> list_overrides;
  std::uint64_t seed_override = 0;
  bool no_geometry_prior = false;
  bool write_occluded = false;

  const auto add_string_opt = [&](CLI::App* cmd, const std::string& flag,
                                  const std::string& key,
                                  const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&string_overrides, key](const std::string& v) {
          string_overrides[key] = v;
        },
        help);
  };
  const auto add_number_opt = [&](CLI::App* cmd, const std::string& flag,
                                  const std::string& key,
                                  const std::string& help) {
    cmd->add_option_function<double>(
        flag, [&number_overrides, key](double v) { number_overrides[key] = v; },
        help);
  };

  CLI::App* inject = app.add_subcommand(
      "inject", "Fit depth alignment, lift a 2D anomaly mask, and integrate "
                "it into a scene grid with occlusion handling");
  add_string_opt(inject, "--scene", "scene", "Scene label grid");
  add_string_opt(inject, "--depth", "depth", "Pseudo-depth raster");
  add_string_opt(inject, "--mask", "mask", "2D anomaly mask (PGM)");
  add_string_opt(inject, "--calib", "calib", "Calibration text file");
  add_string_opt(inject, "--cloud", "cloud", "Point cloud (N x 3 f32)");
  add_string_opt(inject, "--output", "injected_output", "Output grid name");
  add_string_opt(inject, "--out-dir", "output_dir", "Output directory");
  add_number_opt(inject, "--scale", "scale", "Ray-march scale s (step 1/s)");
  add_number_opt(inject, "--sample-count", "sample_count",
                 "Cloud samples for the SVR fit");
  auto* seed_opt = inject->add_option("--seed", seed_override, "RNG seed");
  inject->add_flag("--write-occluded", write_occluded,
                   "Also write occluded anomaly voxels into the labels");

  CLI::App* score = app.add_subcommand(
      "score", "Compute per-voxel anomaly scores from a logit volume");
  add_string_opt(score, "--logits", "logits", "Logit volume");
  add_string_opt(score, "--partition", "partition", "Class partition JSON");
  add_string_opt(score, "--class-means", "class_means",
                 "Calibration class means JSON");
  add_string_opt(score, "--method", "method",
                 "semantic_aware|entropy|energy|posterior");
  add_string_opt(score, "--output", "score_output", "Output score volume name");
  add_string_opt(score, "--out-dir", "output_dir", "Output directory");
  add_number_opt(score, "--region-weight", "region_weight",
                 "Weight on region-class scores");
  score->add_flag("--no-geometry-prior", no_geometry_prior,
                  "Score free-predicted voxels too");

  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate a score volume against ground-truth anomalies");
  add_string_opt(eval, "--scores", "scores", "Score volume");
  add_string_opt(eval, "--gt", "gt", "Ground-truth anomalies (mask volume or "
                                     "label grid)");
  add_string_opt(eval, "--eval-mask", "eval_mask", "Evaluation mask volume");
  add_string_opt(eval, "--pred-grid", "pred_grid", "Predicted label grid");
  add_string_opt(eval, "--gt-grid", "gt_grid", "Ground-truth label grid");
  add_string_opt(eval, "--method", "method", "Method name for the CSV");
  add_string_opt(eval, "--dataset", "dataset", "Dataset name for the CSV");
  add_string_opt(eval, "--semantics", "semantics", "tolerant|dilated_plain");
  add_string_opt(eval, "--csv", "eval_csv", "Output CSV name");
  add_string_opt(eval, "--json", "eval_json", "Output JSON report name");
  add_string_opt(eval, "--out-dir", "output_dir", "Output directory");
  std::vector<int> radii_override;
  eval->add_option("--radius-voxels", radii_override,
                   "Dilation radii in voxels (comma separated)")
      ->delimiter(',');

  CLI::App* report = app.add_subcommand(
      "report", "Aggregate per-frame eval CSVs into dataset-level means");
  std::vector<std::string> report_inputs;
  report->add_option("inputs", report_inputs, "Per-frame eval CSV files");
  add_string_opt(report, "--csv", "report_csv", "Aggregated CSV name");
  add_string_opt(report, "--table", "report_table", "Pivot table name");
  add_string_opt(report, "--out-dir", "output_dir", "Output directory");
  std::vector<std::string> curve_reports;
  report->add_option("--curves", curve_reports,
                     "Eval JSON reports whose curves to re-export as CSV");

  CLI11_PARSE(app, argc, argv);

  return run_guarded([&] {
    json cfg = load_config_file(config_path);
    for (const auto& [key, value] : string_overrides) cfg[key] = value;
    for (const auto& [key, value] : number_overrides) {
      if (key == "sample_count") {
        cfg[key] = static_cast<std::uint64_t>(value);
      } else {
        cfg[key] = value;
      }
    }
    for (const auto& [key, value] : list_overrides) cfg[key] = value;
    if (seed_opt->count() > 0) cfg["seed"] = seed_override;
    if (no_geometry_prior) cfg["use_geometry_prior"] = false;
    if (write_occluded) cfg["write_occluded"] = true;
    if (!radii_override.empty()) cfg["radii_voxels"] = radii_override;
    if (!curve_reports.empty()) cfg["report_curves"] = curve_reports;

    if (inject->parsed()) {
      run_inject(cfg);
    } else if (score->parsed()) {
      run_score(cfg, jobs);
    } else if (eval->parsed()) {
      run_eval(cfg, jobs);
    } else if (report->parsed()) {
      run_report(cfg, report_inputs);
    }
  });
}
