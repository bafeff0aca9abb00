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
#include "voxood/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "voxood/errors.hpp"

namespace voxood {
namespace {

std::vector<Vec3i> ball_offsets(int radius) {
  std::vector<Vec3i> offsets;
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  for (int dz = -radius; dz <= radius; ++dz) {
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        const std::int64_t d2 = static_cast<std::int64_t>(dx) * dx +
                                static_cast<std::int64_t>(dy) * dy +
                                static_cast<std::int64_t>(dz) * dz;
        if (d2 <= r2) offsets.emplace_back(dx, dy, dz);
      }
    }
  }
  return offsets;
}

void require_same_geometry(const GridMeta& a, const GridMeta& b,
                           const char* what) {
  if (!(a == b)) {
    throw SizeMismatchError(std::string("metrics: ") + what +
                            " disagree in grid geometry");
  }
}

}  // namespace

BinaryVolume dilate_labels(const BinaryVolume& gt_anomaly, int radius_voxels) {
  gt_anomaly.validate();
  if (radius_voxels < 0) {
    throw ConfigError("dilate: radius must be non-negative");
  }
  if (radius_voxels == 0) return gt_anomaly;

  const GridMeta& meta = gt_anomaly.meta;
  const std::vector<Vec3i> offsets = ball_offsets(radius_voxels);
  BinaryVolume out = BinaryVolume::zeros(meta);
  const std::int64_t count = meta.voxel_count();
  for (std::int64_t flat = 0; flat < count; ++flat) {
    if (!gt_anomaly.test(flat)) continue;
    const Vec3i center = meta.unflatten(flat);
    for (const Vec3i& d : offsets) {
      const Vec3i v = center + d;
      if (meta.contains(v)) out.set(v);
    }
  }
  return out;
}

double auroc(const ScoreVolume& scores, const BinaryVolume& gt_anomaly,
             const EvalMask& mask) {
  scores.validate();
  gt_anomaly.validate();
  mask.validate();
  require_same_geometry(scores.meta, gt_anomaly.meta, "scores and labels");
  require_same_geometry(scores.meta, mask.meta, "scores and mask");

  std::vector<std::pair<float, bool>> entries;
  const std::int64_t count = scores.meta.voxel_count();
  for (std::int64_t v = 0; v < count; ++v) {
    if (mask.test(v)) entries.emplace_back(scores.scores[v], gt_anomaly.test(v));
  }
  std::int64_t positives = 0;
  for (const auto& [score, is_pos] : entries) positives += is_pos ? 1 : 0;
  const std::int64_t negatives =
      static_cast<std::int64_t>(entries.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricUndefinedError(
        "auroc: needs at least one positive and one negative in the mask");
  }

  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Rank statistic with midranks for ties: AUC = (R+ - P(P+1)/2) / (P N).
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].first == entries[i].first) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t) {
      if (entries[t].second) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

RocCurve roc_curve(const ScoreVolume& scores, const BinaryVolume& gt_anomaly,
                   const EvalMask& mask) {
  scores.validate();
  gt_anomaly.validate();
  mask.validate();
  require_same_geometry(scores.meta, gt_anomaly.meta, "scores and labels");
  require_same_geometry(scores.meta, mask.meta, "scores and mask");

  std::vector<std::pair<float, bool>> entries;
  const std::int64_t count = scores.meta.voxel_count();
  for (std::int64_t v = 0; v < count; ++v) {
    if (mask.test(v)) entries.emplace_back(scores.scores[v], gt_anomaly.test(v));
  }
  std::int64_t positives = 0;
  for (const auto& [score, is_pos] : entries) positives += is_pos ? 1 : 0;
  const std::int64_t negatives =
      static_cast<std::int64_t>(entries.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricUndefinedError(
        "roc curve: needs at least one positive and one negative in the mask");
  }

  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    // Equal scores flip together at one threshold.
    while (j < entries.size() && entries[j].first == entries[i].first) ++j;
    for (std::size_t t = i; t < j; ++t) {
      if (entries[t].second) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.points.push_back({static_cast<double>(fp) / negatives,
                            static_cast<double>(tp) / positives});
    i = j;
  }
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    curve.area += (curve.points[k].fpr - curve.points[k - 1].fpr) *
                  (curve.points[k].tpr + curve.points[k - 1].tpr) * 0.5;
  }
  return curve;
}

PrCurve auprc_regional(const ScoreVolume& scores,
                       const BinaryVolume& gt_anomaly, int radius_voxels,
                       const EvalMask& mask, RegionalSemantics semantics) {
  scores.validate();
  gt_anomaly.validate();
  mask.validate();
  require_same_geometry(scores.meta, gt_anomaly.meta, "scores and labels");
  require_same_geometry(scores.meta, mask.meta, "scores and mask");
  if (radius_voxels < 0) {
    throw ConfigError("auprc: radius must be non-negative");
  }

  const GridMeta& meta = scores.meta;
  const std::int64_t count = meta.voxel_count();
  const BinaryVolume dilated = dilate_labels(gt_anomaly, radius_voxels);

  std::int64_t gt_in_mask = 0;
  for (std::int64_t v = 0; v < count; ++v) {
    if (gt_anomaly.test(v) && mask.test(v)) ++gt_in_mask;
  }
  if (gt_in_mask == 0) {
    throw MetricUndefinedError(
        "auprc: no ground-truth anomaly voxel inside the mask");
  }

  // Entries the threshold sweep flips, most anomalous first.
  std::vector<std::pair<float, bool>> masked;  // (score, inside dilation)
  masked.reserve(count);
  for (std::int64_t v = 0; v < count; ++v) {
    if (mask.test(v)) masked.emplace_back(scores.scores[v], dilated.test(v));
  }
  std::sort(masked.begin(), masked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  // Recall bookkeeping. tolerant: a ground-truth voxel is recalled once the
  // best score within the tolerance ball clears the threshold. dilated_plain:
  // every masked dilated voxel must itself be predicted.
  std::vector<float> recall_keys;
  if (semantics == RegionalSemantics::tolerant) {
    const std::vector<Vec3i> offsets = ball_offsets(radius_voxels);
    recall_keys.reserve(gt_in_mask);
    for (std::int64_t flat = 0; flat < count; ++flat) {
      if (!gt_anomaly.test(flat) || !mask.test(flat)) continue;
      const Vec3i center = meta.unflatten(flat);
      float best = -std::numeric_limits<float>::infinity();
      for (const Vec3i& d : offsets) {
        const Vec3i v = center + d;
        if (meta.contains(v)) {
          best = std::max(best, scores.scores[meta.flat_index(v)]);
        }
      }
      recall_keys.push_back(best);
    }
  } else {
    for (const auto& [score, in_dilated] : masked) {
      if (in_dilated) recall_keys.push_back(score);
    }
  }
  std::sort(recall_keys.begin(), recall_keys.end());
  const double recall_total = static_cast<double>(recall_keys.size());

  std::vector<double> thresholds;  // descending, +inf sentinel first
  {
    std::vector<float> distinct(scores.scores);
    std::sort(distinct.begin(), distinct.end(), std::greater<float>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    thresholds.reserve(distinct.size() + 2);
    thresholds.push_back(std::numeric_limits<double>::infinity());
    for (const float s : distinct) thresholds.push_back(s);
    thresholds.push_back(-std::numeric_limits<double>::infinity());
  }

  PrCurve curve;
  curve.radius_voxels = radius_voxels;
  curve.points.reserve(thresholds.size());
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::size_t next_masked = 0;
  std::size_t uncovered = recall_keys.size();  // keys strictly below threshold
  for (const double tau : thresholds) {
    while (next_masked < masked.size() &&
           static_cast<double>(masked[next_masked].first) >= tau) {
      if (masked[next_masked].second) {
        ++tp;
      } else {
        ++fp;
      }
      ++next_masked;
    }
    while (uncovered > 0 &&
           static_cast<double>(recall_keys[uncovered - 1]) >= tau) {
      --uncovered;
    }
    const double recall =
        (recall_total - static_cast<double>(uncovered)) / recall_total;
    const double precision =
        tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                    : 1.0;
    curve.points.push_back({recall, precision});
  }
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    curve.area += (curve.points[k].recall - curve.points[k - 1].recall) *
                  (curve.points[k].precision + curve.points[k - 1].precision) *
                  0.5;
  }
  return curve;
}

RegionalConfusion confusion_at_threshold(const ScoreVolume& scores,
                                         const BinaryVolume& gt_anomaly,
                                         double threshold, int radius_voxels,
                                         const EvalMask& mask,
                                         RegionalSemantics semantics) {
  scores.validate();
  gt_anomaly.validate();
  mask.validate();
  require_same_geometry(scores.meta, gt_anomaly.meta, "scores and labels");
  require_same_geometry(scores.meta, mask.meta, "scores and mask");
  if (radius_voxels < 0) {
    throw ConfigError("confusion: radius must be non-negative");
  }

  const GridMeta& meta = scores.meta;
  const std::int64_t count = meta.voxel_count();
  const BinaryVolume dilated = dilate_labels(gt_anomaly, radius_voxels);

  RegionalConfusion c;
  for (std::int64_t v = 0; v < count; ++v) {
    if (!mask.test(v)) continue;
    const bool predicted = static_cast<double>(scores.scores[v]) >= threshold;
    const bool in_dilated = dilated.test(v);
    if (predicted) {
      if (in_dilated) {
        ++c.tp;
      } else {
        ++c.fp;
      }
    } else if (!in_dilated) {
      ++c.tn;
    } else if (semantics == RegionalSemantics::dilated_plain) {
      ++c.fn;
    }
    // tolerant: unpredicted dilated voxels fall through; misses are counted
    // per ground-truth voxel below.
  }
  if (semantics == RegionalSemantics::tolerant) {
    const std::vector<Vec3i> offsets = ball_offsets(radius_voxels);
    for (std::int64_t flat = 0; flat < count; ++flat) {
      if (!gt_anomaly.test(flat) || !mask.test(flat)) continue;
      const Vec3i center = meta.unflatten(flat);
      bool covered = false;
      for (const Vec3i& d : offsets) {
        const Vec3i v = center + d;
        if (meta.contains(v) &&
            static_cast<double>(scores.scores[meta.flat_index(v)]) >=
                threshold) {
          covered = true;
          break;
        }
      }
      if (!covered) ++c.fn;
    }
  }
  return c;
}

IouResult occupancy_iou(const LabelGrid& pred, const LabelGrid& gt,
                        const EvalMask& mask) {
  pred.validate();
  gt.validate();
  mask.validate();
  require_same_geometry(pred.meta, gt.meta, "prediction and ground truth");
  require_same_geometry(pred.meta, mask.meta, "prediction and mask");

  std::int64_t intersection = 0;
  std::int64_t uni = 0;
  const std::int64_t count = pred.meta.voxel_count();
  for (std::int64_t v = 0; v < count; ++v) {
    if (!mask.test(v)) continue;
    const bool a = pred.labels[v] != pred.free_class;
    const bool b = gt.labels[v] != gt.free_class;
    if (a && b) ++intersection;
    if (a || b) ++uni;
  }
  IouResult result;
  if (uni == 0) {
    result.empty_union = true;
    return result;
  }
  result.value = static_cast<double>(intersection) / static_cast<double>(uni);
  return result;
}

MiouResult semantic_miou(const LabelGrid& pred, const LabelGrid& gt,
                         const std::vector<std::uint16_t>& classes,
                         const EvalMask& mask) {
  pred.validate();
  gt.validate();
  mask.validate();
  require_same_geometry(pred.meta, gt.meta, "prediction and ground truth");
  require_same_geometry(pred.meta, mask.meta, "prediction and mask");

  MiouResult result;
  double sum = 0.0;
  const std::int64_t count = pred.meta.voxel_count();
  for (const std::uint16_t cls : classes) {
    if (cls == gt.free_class) continue;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    for (std::int64_t v = 0; v < count; ++v) {
      if (!mask.test(v)) continue;
      const bool p = pred.labels[v] == cls;
      const bool g = gt.labels[v] == cls;
      if (p && g) {
        ++tp;
      } else if (p) {
        ++fp;
      } else if (g) {
        ++fn;
      }
    }
    if (tp + fn == 0) continue;  // class absent from ground truth
    const double iou =
        static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    result.per_class[cls] = iou;
    sum += iou;
    ++result.present_classes;
  }
  if (result.present_classes > 0) {
    result.miou = sum / result.present_classes;
  }
  return result;
}

}  // namespace voxood
