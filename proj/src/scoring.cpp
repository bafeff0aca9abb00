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
#include "voxood/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "voxood/errors.hpp"

namespace voxood {

void ClassPartition::validate() const {
  if (!(region_weight > 0.0) || region_weight > 1.0) {
    throw ConfigError("partition: region_weight must lie in (0, 1]");
  }
  int free_count = 0;
  for (const auto& [cls, group] : mapping) {
    if (group == ClassGroup::free_space) ++free_count;
  }
  if (free_count != 1) {
    throw ConfigError("partition: exactly one free class required, found " +
                      std::to_string(free_count));
  }
}

ClassGroup ClassPartition::group_of(std::uint16_t cls) const {
  const auto it = mapping.find(cls);
  if (it == mapping.end()) {
    throw ConfigError("partition: class " + std::to_string(cls) +
                      " has no group assignment");
  }
  return it->second;
}

std::uint16_t ClassPartition::free_class() const {
  for (const auto& [cls, group] : mapping) {
    if (group == ClassGroup::free_space) return cls;
  }
  throw ConfigError("partition: no free class assigned");
}

std::vector<std::uint16_t> ClassPartition::missing_classes(
    std::uint32_t num_classes) const {
  std::vector<std::uint16_t> missing;
  for (std::uint32_t c = 0; c < num_classes; ++c) {
    if (mapping.count(static_cast<std::uint16_t>(c)) == 0) {
      missing.push_back(static_cast<std::uint16_t>(c));
    }
  }
  return missing;
}

Eigen::VectorXd softmax_probs(const Eigen::VectorXd& logits) {
  const double peak = logits.maxCoeff();
  Eigen::VectorXd probs = (logits.array() - peak).exp();
  probs /= probs.sum();
  return probs;
}

double entropy_score(const Eigen::VectorXd& probs) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    const double p = probs[k];
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double cosine_score(const Eigen::VectorXd& logit, const Eigen::VectorXd& mean,
                    std::int64_t* degenerate) {
  const double ln = logit.norm();
  const double mn = mean.norm();
  if (ln == 0.0 || mn == 0.0) {
    if (degenerate != nullptr) ++*degenerate;
    return 0.0;
  }
  const double cosine = std::clamp(logit.dot(mean) / (ln * mn), -1.0, 1.0);
  return 1.0 - cosine;
}

double energy_score(const Eigen::VectorXd& logits) {
  const double peak = logits.maxCoeff();
  return -(peak + std::log((logits.array() - peak).exp().sum()));
}

double posterior_score(const Eigen::VectorXd& logits) {
  return 1.0 - logits.maxCoeff();
}

GeometryPrior geometry_prior(const LogitVolume& volume,
                             std::uint16_t free_class) {
  volume.validate();
  const std::int64_t count = volume.meta.voxel_count();

  GeometryPrior prior;
  prior.pred_labels.meta = volume.meta;
  prior.pred_labels.free_class = free_class;
  prior.pred_labels.labels.assign(count, 0);

  // Class-major storage rewards plane-at-a-time sweeps: each class is one
  // contiguous pass. Updating on strictly-greater keeps ties at the lowest ID.
  std::vector<float> best(volume.values.begin(), volume.values.begin() + count);
  for (std::uint32_t c = 1; c < volume.num_classes; ++c) {
    const float* plane = volume.values.data() + static_cast<std::int64_t>(c) * count;
    for (std::int64_t v = 0; v < count; ++v) {
      if (plane[v] > best[v]) {
        best[v] = plane[v];
        prior.pred_labels.labels[v] = static_cast<std::uint16_t>(c);
      }
    }
  }

  prior.occupied.meta = volume.meta;
  prior.occupied.values.assign(count, 0);
  for (std::int64_t v = 0; v < count; ++v) {
    prior.occupied.values[v] = prior.pred_labels.labels[v] != free_class;
  }
  return prior;
}

ClassMeanLogits class_mean_logits(const LogitVolume& volume,
                                  const LabelGrid& pred_labels,
                                  const BinaryVolume& occupied) {
  volume.validate();
  pred_labels.validate();
  occupied.validate();
  if (!(pred_labels.meta == volume.meta) || !(occupied.meta == volume.meta)) {
    throw SizeMismatchError("class means: label/occupancy grids disagree "
                            "with the logit volume geometry");
  }
  const std::int64_t count = volume.meta.voxel_count();
  const std::uint32_t k = volume.num_classes;

  std::vector<std::int64_t> support(k, 0);
  for (std::int64_t v = 0; v < count; ++v) {
    if (occupied.values[v] != 0) {
      const std::uint16_t cls = pred_labels.labels[v];
      if (cls >= k) {
        throw ConfigError("class means: predicted label exceeds class count");
      }
      ++support[cls];
    }
  }

  std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(k));
  for (std::uint32_t c = 0; c < k; ++c) {
    const float* plane = volume.values.data() + static_cast<std::int64_t>(c) * count;
    for (std::int64_t v = 0; v < count; ++v) {
      if (occupied.values[v] != 0) {
        sums[pred_labels.labels[v]][c] += static_cast<double>(plane[v]);
      }
    }
  }

  ClassMeanLogits means;
  for (std::uint32_t cls = 0; cls < k; ++cls) {
    if (support[cls] > 0) {
      const auto id = static_cast<std::uint16_t>(cls);
      means.means[id] = sums[cls] / static_cast<double>(support[cls]);
      means.counts[id] = support[cls];
    }
  }
  return means;
}

namespace {

/// Min-max normalizes raw scores over the domain into [0, 1] floats; voxels
/// outside the domain and degenerate ranges map to exactly 0.
ScoreVolume normalize_over_domain(const GridMeta& meta,
                                  const std::vector<double>& raw,
                                  const std::vector<std::uint8_t>& domain,
                                  ScoringDiagnostics* diagnostics) {
  ScoreVolume out;
  out.meta = meta;
  out.scores.assign(raw.size(), 0.0F);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (domain[v] != 0) {
      lo = std::min(lo, raw[v]);
      hi = std::max(hi, raw[v]);
    }
  }
  if (!(hi > lo)) {
    if (diagnostics != nullptr && lo == hi) diagnostics->degenerate_range = true;
    return out;
  }
  const double span = hi - lo;
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (domain[v] != 0) {
      out.scores[v] = static_cast<float>(
          std::clamp((raw[v] - lo) / span, 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace

ScoreVolume semantic_aware_score(const LogitVolume& volume,
                                 const ClassPartition& partition,
                                 const ScoringOptions& options,
                                 ScoringDiagnostics* diagnostics) {
  volume.validate();
  partition.validate();
  const auto missing = partition.missing_classes(volume.num_classes);
  if (!missing.empty()) {
    std::string ids;
    for (const std::uint16_t c : missing) {
      if (!ids.empty()) ids += ", ";
      ids += std::to_string(c);
    }
    throw ConfigError("partition: missing class IDs: " + ids);
  }

  const std::uint16_t free_class = partition.free_class();
  const GeometryPrior prior = geometry_prior(volume, free_class);
  const ClassMeanLogits frame_means =
      options.external_means != nullptr
          ? ClassMeanLogits{}
          : class_mean_logits(volume, prior.pred_labels, prior.occupied);
  const ClassMeanLogits& means =
      options.external_means != nullptr ? *options.external_means : frame_means;

  ScoringDiagnostics local;
  local.occupied_count = prior.occupied.count();
  if (options.use_geometry_prior && local.occupied_count == 0) {
    local.empty_occupancy = true;
    if (diagnostics != nullptr) *diagnostics = local;
    ScoreVolume out;
    out.meta = volume.meta;
    out.scores.assign(volume.meta.voxel_count(), 0.0F);
    return out;
  }

  const std::int64_t count = volume.meta.voxel_count();
  const std::uint32_t k = volume.num_classes;
  std::vector<const float*> planes(k);
  for (std::uint32_t c = 0; c < k; ++c) {
    planes[c] = volume.values.data() + static_cast<std::int64_t>(c) * count;
  }

  std::vector<double> raw(count, 0.0);
  std::vector<std::uint8_t> domain(count, 0);
  Eigen::VectorXd logit(k);
  for (std::int64_t v = 0; v < count; ++v) {
    const bool occupied = prior.occupied.values[v] != 0;
    if (options.use_geometry_prior && !occupied) continue;
    domain[v] = 1;
    for (std::uint32_t c = 0; c < k; ++c) {
      logit[c] = static_cast<double>(planes[c][v]);
    }
    const std::uint16_t cls = prior.pred_labels.labels[v];
    const ClassGroup group = partition.group_of(cls);
    switch (group) {
      case ClassGroup::instance:
        if (means.has(cls)) {
          raw[v] = cosine_score(logit, means.means.at(cls),
                                &local.zero_norm_cosine);
        } else {
          raw[v] = entropy_score(softmax_probs(logit));
          ++local.missing_mean_fallbacks;
        }
        break;
      case ClassGroup::region:
      case ClassGroup::free_space:
        raw[v] = entropy_score(softmax_probs(logit)) * partition.region_weight;
        break;
    }
  }

  ScoreVolume out = normalize_over_domain(volume.meta, raw, domain, &local);
  if (diagnostics != nullptr) *diagnostics = local;
  return out;
}

ScoreVolume baseline_score_volume(const LogitVolume& volume,
                                  BaselineMethod method,
                                  bool use_geometry_prior,
                                  std::uint16_t free_class,
                                  ScoringDiagnostics* diagnostics) {
  volume.validate();
  const GeometryPrior prior = geometry_prior(volume, free_class);

  ScoringDiagnostics local;
  local.occupied_count = prior.occupied.count();
  if (use_geometry_prior && local.occupied_count == 0) {
    local.empty_occupancy = true;
    if (diagnostics != nullptr) *diagnostics = local;
    ScoreVolume out;
    out.meta = volume.meta;
    out.scores.assign(volume.meta.voxel_count(), 0.0F);
    return out;
  }

  const std::int64_t count = volume.meta.voxel_count();
  const std::uint32_t k = volume.num_classes;
  std::vector<const float*> planes(k);
  for (std::uint32_t c = 0; c < k; ++c) {
    planes[c] = volume.values.data() + static_cast<std::int64_t>(c) * count;
  }

  std::vector<double> raw(count, 0.0);
  std::vector<std::uint8_t> domain(count, 0);
  Eigen::VectorXd logit(k);
  for (std::int64_t v = 0; v < count; ++v) {
    if (use_geometry_prior && prior.occupied.values[v] == 0) continue;
    domain[v] = 1;
    for (std::uint32_t c = 0; c < k; ++c) {
      logit[c] = static_cast<double>(planes[c][v]);
    }
    switch (method) {
      case BaselineMethod::entropy:
        raw[v] = entropy_score(softmax_probs(logit));
        break;
      case BaselineMethod::energy:
        raw[v] = energy_score(logit);
        break;
      case BaselineMethod::posterior:
        raw[v] = posterior_score(logit);
        break;
    }
  }

  ScoreVolume out = normalize_over_domain(volume.meta, raw, domain, &local);
  if (diagnostics != nullptr) *diagnostics = local;
  return out;
}

}  // namespace voxood
