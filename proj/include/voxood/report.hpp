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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace voxood {

/// Column order of the evaluation CSV. Method and dataset names must not
/// contain commas; IoU columns stay empty when no prediction grid was
/// evaluated.
inline constexpr const char* kEvalCsvHeader =
    "method,dataset,radius_m,auprc_r,auroc,iou,miou";

struct EvalRow {
  std::string method;
  std::string dataset;
  double radius_m = 0.0;
  double auprc_r = 0.0;
  double auroc = 0.0;
  std::optional<double> iou;
  std::optional<double> miou;
};

void write_eval_csv(const std::vector<EvalRow>& rows,
                    const std::filesystem::path& path);

/// Throws ConfigError naming the first missing or unexpected header column,
/// or the offending row for malformed numbers.
std::vector<EvalRow> read_eval_csv(const std::filesystem::path& path);

/// Means per (method, dataset, radius_m) group, groups ordered by first
/// appearance. Optional columns average over the rows where they are
/// present. Throws EmptyAggregationError on no input rows.
std::vector<EvalRow> aggregate_rows(const std::vector<EvalRow>& rows);

/// Plain-text pivot of aggregated rows: one block per dataset, methods as
/// rows, one AuPRC_r column per radius plus a final AuROC column.
std::string format_pivot(const std::vector<EvalRow>& aggregated);

/// Cap applied to curve samples embedded in JSON reports; full curves over
/// dense volumes would hold millions of points.
inline constexpr std::size_t kDefaultCurveSampleCap = 2048;

/// Uniform subsampling preserving the first and last point; identity when
/// the curve already fits the cap.
std::vector<std::pair<double, double>> decimate_curve(
    const std::vector<std::pair<double, double>>& points, std::size_t cap);

}  // namespace voxood
