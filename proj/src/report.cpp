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
#include "voxood/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "voxood/errors.hpp"

namespace voxood {
namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_required(const std::string& field, const std::string& column,
                      std::size_t line_number) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("csv line " + std::to_string(line_number) +
                      ": bad value '" + field + "' in column '" + column +
                      "'");
  }
}

std::optional<double> parse_optional(const std::string& field,
                                     const std::string& column,
                                     std::size_t line_number) {
  if (field.empty()) return std::nullopt;
  return parse_required(field, column, line_number);
}

}  // namespace

void write_eval_csv(const std::vector<EvalRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) {
    throw Error("cannot open output file: " + path.string());
  }
  f << kEvalCsvHeader << "\n";
  for (const EvalRow& row : rows) {
    f << row.method << "," << row.dataset << "," << format_double(row.radius_m)
      << "," << format_double(row.auprc_r) << "," << format_double(row.auroc)
      << "," << (row.iou ? format_double(*row.iou) : "") << ","
      << (row.miou ? format_double(*row.miou) : "") << "\n";
  }
  if (!f) throw Error("write failed: " + path.string());
}

std::vector<EvalRow> read_eval_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw MissingInputError("cannot open input file: " + path.string());
  }
  std::string line;
  if (!std::getline(f, line)) {
    throw ConfigError("csv is empty (no header): " + path.string());
  }
  const std::vector<std::string> expected = split_csv_line(kEvalCsvHeader);
  const std::vector<std::string> header = split_csv_line(line);
  for (const std::string& column : expected) {
    if (std::find(header.begin(), header.end(), column) == header.end()) {
      throw ConfigError("csv " + path.string() + ": missing column '" +
                        column + "'");
    }
  }
  if (header != expected) {
    throw ConfigError("csv " + path.string() +
                      ": columns out of order or extra columns (expected '" +
                      std::string(kEvalCsvHeader) + "')");
  }

  std::vector<EvalRow> rows;
  std::size_t line_number = 1;
  while (std::getline(f, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != expected.size()) {
      throw ConfigError("csv line " + std::to_string(line_number) + ": got " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(expected.size()));
    }
    EvalRow row;
    row.method = fields[0];
    row.dataset = fields[1];
    row.radius_m = parse_required(fields[2], "radius_m", line_number);
    row.auprc_r = parse_required(fields[3], "auprc_r", line_number);
    row.auroc = parse_required(fields[4], "auroc", line_number);
    row.iou = parse_optional(fields[5], "iou", line_number);
    row.miou = parse_optional(fields[6], "miou", line_number);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<EvalRow> aggregate_rows(const std::vector<EvalRow>& rows) {
  if (rows.empty()) {
    throw EmptyAggregationError("aggregation received no rows");
  }
  struct Accumulator {
    std::size_t order;
    double auprc_sum = 0.0;
    double auroc_sum = 0.0;
    std::int64_t count = 0;
    double iou_sum = 0.0;
    std::int64_t iou_count = 0;
    double miou_sum = 0.0;
    std::int64_t miou_count = 0;
  };
  std::map<std::tuple<std::string, std::string, double>, Accumulator> groups;
  std::vector<const std::tuple<std::string, std::string, double>*> order;
  for (const EvalRow& row : rows) {
    const auto key = std::make_tuple(row.method, row.dataset, row.radius_m);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.order = order.size();
      order.push_back(&it->first);
    }
    Accumulator& acc = it->second;
    acc.auprc_sum += row.auprc_r;
    acc.auroc_sum += row.auroc;
    ++acc.count;
    if (row.iou) {
      acc.iou_sum += *row.iou;
      ++acc.iou_count;
    }
    if (row.miou) {
      acc.miou_sum += *row.miou;
      ++acc.miou_count;
    }
  }
  std::vector<EvalRow> out(order.size());
  for (const auto& [key, acc] : groups) {
    EvalRow row;
    row.method = std::get<0>(key);
    row.dataset = std::get<1>(key);
    row.radius_m = std::get<2>(key);
    row.auprc_r = acc.auprc_sum / static_cast<double>(acc.count);
    row.auroc = acc.auroc_sum / static_cast<double>(acc.count);
    if (acc.iou_count > 0) {
      row.iou = acc.iou_sum / static_cast<double>(acc.iou_count);
    }
    if (acc.miou_count > 0) {
      row.miou = acc.miou_sum / static_cast<double>(acc.miou_count);
    }
    out[acc.order] = std::move(row);
  }
  return out;
}

std::string format_pivot(const std::vector<EvalRow>& aggregated) {
  // First-appearance orders keep reruns byte-identical.
  std::vector<std::string> datasets;
  for (const EvalRow& row : aggregated) {
    if (std::find(datasets.begin(), datasets.end(), row.dataset) ==
        datasets.end()) {
      datasets.push_back(row.dataset);
    }
  }

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const std::string& dataset : datasets) {
    std::vector<std::string> methods;
    std::vector<double> radii;
    for (const EvalRow& row : aggregated) {
      if (row.dataset != dataset) continue;
      if (std::find(methods.begin(), methods.end(), row.method) ==
          methods.end()) {
        methods.push_back(row.method);
      }
      if (std::find(radii.begin(), radii.end(), row.radius_m) ==
          radii.end()) {
        radii.push_back(row.radius_m);
      }
    }
    std::sort(radii.begin(), radii.end());

    std::size_t name_width = std::string("method").size();
    for (const std::string& m : methods) {
      name_width = std::max(name_width, m.size());
    }

    out << "dataset: " << dataset << "\n";
    out << std::left << std::setw(static_cast<int>(name_width) + 2)
        << "method" << std::right;
    for (const double r : radii) {
      std::ostringstream label;
      label << std::fixed << std::setprecision(1) << r << "m";
      out << std::setw(10) << label.str();
    }
    out << std::setw(10) << "AuROC" << "\n";
    for (const std::string& method : methods) {
      out << std::left << std::setw(static_cast<int>(name_width) + 2) << method
          << std::right;
      double auroc_sum = 0.0;
      int auroc_count = 0;
      for (const double r : radii) {
        bool found = false;
        for (const EvalRow& row : aggregated) {
          if (row.dataset == dataset && row.method == method &&
              row.radius_m == r) {
            out << std::setw(10) << row.auprc_r;
            auroc_sum += row.auroc;
            ++auroc_count;
            found = true;
            break;
          }
        }
        if (!found) out << std::setw(10) << "-";
      }
      if (auroc_count > 0) {
        out << std::setw(10) << (auroc_sum / auroc_count);
      } else {
        out << std::setw(10) << "-";
      }
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

std::vector<std::pair<double, double>> decimate_curve(
    const std::vector<std::pair<double, double>>& points, std::size_t cap) {
  if (cap < 2 || points.size() <= cap) return points;
  std::vector<std::pair<double, double>> out;
  out.reserve(cap);
  const double stride = static_cast<double>(points.size() - 1) /
                        static_cast<double>(cap - 1);
  std::size_t last = points.size();
  for (std::size_t i = 0; i < cap; ++i) {
    const auto idx = static_cast<std::size_t>(std::llround(i * stride));
    if (idx != last) {
      out.push_back(points[idx]);
      last = idx;
    }
  }
  return out;
}

}  // namespace voxood
