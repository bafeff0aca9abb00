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
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "voxood/grid.hpp"

namespace voxood {

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // threshold descending, (0,0) .. (1,1)
  double area = 0.0;
};

struct PrPoint {
  double recall;
  double precision;
};

struct PrCurve {
  std::vector<PrPoint> points;  // threshold descending, recall non-decreasing
  double area = 0.0;
  int radius_voxels = 0;
};

/// How regional tolerance enters the confusion counts.
///
/// tolerant: predictions inside the dilated ground truth D are true
/// positives, predictions outside are false positives, a ground-truth voxel
/// counts as recalled when any predicted-positive voxel lies within the
/// radius, and unpredicted voxels of the dilation shell D minus GT are
/// excluded from the negatives.
///
/// dilated_plain: ordinary voxel-wise precision/recall against D as the
/// positive label, kept for comparison.
enum class RegionalSemantics { tolerant, dilated_plain };

/// Marks every voxel within Euclidean distance radius_voxels (in voxel
/// units) of a set voxel. Radius 0 is the identity.
BinaryVolume dilate_labels(const BinaryVolume& gt_anomaly, int radius_voxels);

/// Area under the ROC curve over masked voxels via the rank statistic, ties
/// counted one half. Throws MetricUndefinedError unless the mask holds at
/// least one positive and one negative.
double auroc(const ScoreVolume& scores, const BinaryVolume& gt_anomaly,
             const EvalMask& mask);

/// Explicit ROC curve at every distinct masked score; its trapezoidal area
/// equals auroc().
RocCurve roc_curve(const ScoreVolume& scores, const BinaryVolume& gt_anomaly,
                   const EvalMask& mask);

/// Precision-recall curve with regional tolerance; thresholds are every
/// distinct score value plus infinite sentinels, integrated by trapezoid
/// over recall. Throws MetricUndefinedError when no ground-truth voxel lies
/// inside the mask.
PrCurve auprc_regional(const ScoreVolume& scores,
                       const BinaryVolume& gt_anomaly, int radius_voxels,
                       const EvalMask& mask,
                       RegionalSemantics semantics = RegionalSemantics::tolerant);

struct RegionalConfusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
};

/// Single-threshold counts under the same semantics as auprc_regional; a
/// voxel is predicted positive when its score is >= threshold.
RegionalConfusion confusion_at_threshold(
    const ScoreVolume& scores, const BinaryVolume& gt_anomaly,
    double threshold, int radius_voxels, const EvalMask& mask,
    RegionalSemantics semantics = RegionalSemantics::tolerant);

struct IouResult {
  double value = 0.0;
  bool empty_union = false;  // no occupied voxel in either grid; value is 0
};

/// Intersection over union of the occupied/free binarization (any non-free
/// label counts occupied) over masked voxels.
IouResult occupancy_iou(const LabelGrid& pred, const LabelGrid& gt,
                        const EvalMask& mask);

struct MiouResult {
  /// IoU per evaluated class; only classes with at least one ground-truth
  /// voxel in the mask appear.
  std::map<std::uint16_t, double> per_class;
  double miou = 0.0;
  int present_classes = 0;
};

/// Per-class IoU over the given semantic classes (the ground truth's free
/// class is skipped) and their mean over classes present in the ground
/// truth; absent classes do not dilute the mean.
MiouResult semantic_miou(const LabelGrid& pred, const LabelGrid& gt,
                         const std::vector<std::uint16_t>& classes,
                         const EvalMask& mask);

}  // namespace voxood
