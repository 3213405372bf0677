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

#ifndef MATHLINK_TRAINER_H_
#define MATHLINK_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mathlink/aggregate.h"
#include "mathlink/corpus.h"
#include "mathlink/model.h"
#include "mathlink/predict.h"

namespace mathlink {

struct TrainConfig {
  double learning_rate = 5e-5;
  int epochs = 60;
  int warmup_epochs = 1;
  int batch_size = 4;
  double max_grad_norm = 1.0;
  double weight_decay = 0.01;
  int downsample = 1000;     // D
  int k_train = 50;
  int k_eval_dev = 50;
  int k_eval_test = 400;
  Pooling pooling = Pooling::kMax;
  Preprocess preprocess = Preprocess::kNone;
  double margin = 1.0;
  int nota = 4;              // m
  int max_span_length = 16;  // n
  uint64_t seed = 0;
  double mention_loss_weight = 1.0;
  double relation_loss_weight = 1.0;
  int patience = 10;         // epochs without dev improvement before stopping
  // Stops as soon as dev micro RE F1 reaches this value; > 1 disables it.
  double stop_at_dev_f1 = 2.0;
  EncoderKind encoder = EncoderKind::kToy;
  int hidden_size = 32;
  int window = 512;
  int stride = 256;
  std::string vocab;         // optional WordPiece vocabulary file
  bool lowercase = false;
};

// Rejects non-positive sizes and rates and k_train > k_eval_test.
void ValidateTrainConfig(const TrainConfig &config);
// Flat key/value object; unknown keys are an error, missing keys keep their
// defaults.
TrainConfig TrainConfigFromJson(const nlohmann::json &json);
nlohmann::json ToJson(const TrainConfig &config);
TrainConfig LoadTrainConfig(const std::filesystem::path &path);
ModelConfig ToModelConfig(const TrainConfig &config);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double mention_loss = 0.0;
  double relation_loss = 0.0;
  double learning_rate = 0.0;   // at the last step of the epoch
  double max_grad_norm = 0.0;   // largest pre-clip norm seen in the epoch
  Prf dev;                      // strict micro RE on the dev set
  bool improved = false;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  Checkpoint best;
  EvaluationReport best_dev;
  std::vector<EpochRecord> epochs;
  bool early_stopped = false;

  // Flat metrics of the retained checkpoint, used by aggregation.
  RunMetrics Metrics() const;
  // {"seed", "config", "best_epoch", "metrics", "epochs"}.
  nlohmann::json RunLog() const;
};

using EpochCallback = std::function<void(const EpochRecord &)>;

// Trains on `train`, selects the checkpoint with the best dev micro RE F1
// and stops after config.epochs or `patience` epochs without improvement.
// Throws DivergenceError on a non-finite loss.
TrainResult Train(const TrainConfig &config, const std::vector<RawDocument> &train,
                  const std::vector<RawDocument> &dev, const EpochCallback &on_epoch = {});

struct SeedsReport {
  std::vector<TrainResult> runs;
  std::map<std::string, MetricSummary> summary;
};

// One training run per seed (config.seed is overridden), then per-metric
// median and population standard deviation. Writes run_<seed>.json per run
// into `log_dir` when given.
SeedsReport RunSeedsAggregate(const TrainConfig &config, const std::vector<RawDocument> &train,
                              const std::vector<RawDocument> &dev,
                              const std::vector<uint64_t> &seeds,
                              const std::optional<std::filesystem::path> &log_dir = std::nullopt);

}  // namespace mathlink

#endif  // MATHLINK_TRAINER_H_
