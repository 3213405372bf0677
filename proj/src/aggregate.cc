// Copyright 2026 The Mathlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mathlink/aggregate.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mathlink/errors.h"

namespace mathlink {

double Median(std::span<const double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

double PopulationStdDev(std::span<const double> values) {
  if (values.empty()) throw ValidationError("standard deviation of an empty set");
  // Shifting by the first value keeps identical inputs at exactly zero.
  const double shift = values.front();
  double mean = 0.0;
  for (double v : values) mean += v - shift;
  mean /= static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += (v - shift - mean) * (v - shift - mean);
  return std::sqrt(sum / static_cast<double>(values.size()));
}

std::map<std::string, MetricSummary> AggregateRuns(std::span<const RunMetrics> runs) {
  if (runs.size() < 2) throw ConfigError("aggregation needs at least two runs");
  std::map<std::string, MetricSummary> out;
  for (const auto &[name, value] : runs.front()) out[name];
  for (const auto &run : runs) {
    if (run.size() != out.size()) throw ValidationError("runs report different metric sets");
    for (const auto &[name, value] : run) {
      auto it = out.find(name);
      if (it == out.end()) throw ValidationError("metric " + name + " missing from some runs");
      it->second.values.push_back(value);
    }
  }
  for (auto &[name, summary] : out) {
    summary.median = Median(summary.values);
    summary.stddev = PopulationStdDev(summary.values);
  }
  return out;
}

nlohmann::json ToJson(const std::map<std::string, MetricSummary> &summary) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto &[name, s] : summary) {
    out[name] = {{"median", s.median}, {"std", s.stddev}, {"values", s.values}};
  }
  return out;
}

RunMetrics RunMetricsFromJson(const nlohmann::json &run) {
  if (!run.is_object() || !run.contains("metrics") || !run.at("metrics").is_object()) {
    throw FormatError("run log lacks a metrics object");
  }
  RunMetrics out;
  for (const auto &[name, value] : run.at("metrics").items()) {
    if (!value.is_number()) throw FormatError("metric " + name + " is not a number");
    out[name] = value.get<double>();
  }
  return out;
}

std::vector<RunMetrics> LoadRunLogs(const std::filesystem::path &dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("run directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunMetrics> runs;
  for (const auto &path : files) {
    std::ifstream in(path, std::ios::binary);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains("metrics")) runs.push_back(RunMetricsFromJson(j));
  }
  return runs;
}

}  // namespace mathlink
