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

#ifndef MATHLINK_AGGREGATE_H_
#define MATHLINK_AGGREGATE_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace mathlink {

// Mean of the two middle values for an even count.
double Median(std::span<const double> values);
// Population (divide-by-n) standard deviation.
double PopulationStdDev(std::span<const double> values);

using RunMetrics = std::map<std::string, double>;

struct MetricSummary {
  double median = 0.0;
  double stddev = 0.0;
  std::vector<double> values;  // in run order
};

// Summarizes each metric across runs. Needs at least two runs reporting the
// same metric names.
std::map<std::string, MetricSummary> AggregateRuns(std::span<const RunMetrics> runs);

nlohmann::json ToJson(const std::map<std::string, MetricSummary> &summary);

// Per-run log: {"seed": ..., "metrics": {name: number, ...}, ...}.
RunMetrics RunMetricsFromJson(const nlohmann::json &run);
// Reads every *.json file in `dir` (sorted by name) that carries a metrics
// object.
std::vector<RunMetrics> LoadRunLogs(const std::filesystem::path &dir);

}  // namespace mathlink

#endif  // MATHLINK_AGGREGATE_H_
