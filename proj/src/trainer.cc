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

#include "mathlink/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "mathlink/errors.h"
#include "mathlink/optimizer.h"

namespace mathlink {
namespace {

using json = nlohmann::json;

// Independent random streams derived from the run seed.
constexpr uint64_t kShuffleStream = 0x5bd1e9955bd1e995ULL;
constexpr uint64_t kSampleStream = 0x9e3779b97f4a7c15ULL;

template <typename T>
void ReadField(const json &j, const char *key, T *out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

Tokenizer MakeTokenizer(const TrainConfig &config) {
  if (config.vocab.empty()) return Tokenizer({}, config.lowercase);
  return Tokenizer::FromVocabFile(config.vocab, config.lowercase);
}

}  // namespace

void ValidateTrainConfig(const TrainConfig &c) {
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (c.warmup_epochs < 1 || c.warmup_epochs > c.epochs) {
    throw ConfigError("warmup_epochs must lie in [1, epochs]");
  }
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(c.max_grad_norm > 0.0)) throw ConfigError("max_grad_norm must be positive");
  if (c.weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
  if (c.downsample < 1) throw ConfigError("downsample must be >= 1");
  if (c.k_train < 1 || c.k_eval_dev < 1 || c.k_eval_test < 1) {
    throw ConfigError("k values must be >= 1");
  }
  if (c.k_train > c.k_eval_test) throw ConfigError("k_train must not exceed k_eval_test");
  if (!(c.margin > 0.0)) throw ConfigError("margin must be positive");
  if (c.nota < 1) throw ConfigError("nota must be >= 1");
  if (c.max_span_length < 1) throw ConfigError("max_span_length must be >= 1");
  if (!(c.mention_loss_weight > 0.0) || !(c.relation_loss_weight > 0.0)) {
    throw ConfigError("loss weights must be positive");
  }
  if (c.patience < 1) throw ConfigError("patience must be >= 1");
  ValidateEncoderConfig(ToModelConfig(c).encoder);
}

TrainConfig TrainConfigFromJson(const json &j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char *kKeys[] = {
      "learning_rate", "epochs",       "warmup_epochs",      "batch_size",
      "max_grad_norm", "weight_decay", "downsample",         "k_train",
      "k_eval_dev",    "k_eval_test",  "pooling",            "preprocess",
      "margin",        "nota",         "max_span_length",    "seed",
      "mention_loss_weight", "relation_loss_weight", "patience", "stop_at_dev_f1",
      "encoder",       "hidden_size",  "window",             "stride",
      "vocab",         "lowercase"};
  for (const auto &[key, value] : j.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys),
                     [&](const char *k) { return key == k; }) == std::end(kKeys)) {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }
  TrainConfig c;
  try {
    ReadField(j, "learning_rate", &c.learning_rate);
    ReadField(j, "epochs", &c.epochs);
    ReadField(j, "warmup_epochs", &c.warmup_epochs);
    ReadField(j, "batch_size", &c.batch_size);
    ReadField(j, "max_grad_norm", &c.max_grad_norm);
    ReadField(j, "weight_decay", &c.weight_decay);
    ReadField(j, "downsample", &c.downsample);
    ReadField(j, "k_train", &c.k_train);
    ReadField(j, "k_eval_dev", &c.k_eval_dev);
    ReadField(j, "k_eval_test", &c.k_eval_test);
    ReadField(j, "margin", &c.margin);
    ReadField(j, "nota", &c.nota);
    ReadField(j, "max_span_length", &c.max_span_length);
    ReadField(j, "seed", &c.seed);
    ReadField(j, "mention_loss_weight", &c.mention_loss_weight);
    ReadField(j, "relation_loss_weight", &c.relation_loss_weight);
    ReadField(j, "patience", &c.patience);
    ReadField(j, "stop_at_dev_f1", &c.stop_at_dev_f1);
    ReadField(j, "hidden_size", &c.hidden_size);
    ReadField(j, "window", &c.window);
    ReadField(j, "stride", &c.stride);
    ReadField(j, "vocab", &c.vocab);
    ReadField(j, "lowercase", &c.lowercase);
    if (j.contains("pooling")) {
      auto pooling = ParsePooling(j.at("pooling").get<std::string>());
      if (!pooling) throw ConfigError("pooling must be \"max\" or \"mean\"");
      c.pooling = *pooling;
    }
    if (j.contains("preprocess")) {
      auto preprocess = ParsePreprocess(j.at("preprocess").get<std::string>());
      if (!preprocess) throw ConfigError("preprocess must be \"none\" or \"latex2text\"");
      c.preprocess = *preprocess;
    }
    if (j.contains("encoder")) {
      auto kind = ParseEncoderKind(j.at("encoder").get<std::string>());
      if (!kind) throw ConfigError("encoder must be \"toy\" or \"pretrained-adapter\"");
      c.encoder = *kind;
    }
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  ValidateTrainConfig(c);
  return c;
}

json ToJson(const TrainConfig &c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"warmup_epochs", c.warmup_epochs},
          {"batch_size", c.batch_size},
          {"max_grad_norm", c.max_grad_norm},
          {"weight_decay", c.weight_decay},
          {"downsample", c.downsample},
          {"k_train", c.k_train},
          {"k_eval_dev", c.k_eval_dev},
          {"k_eval_test", c.k_eval_test},
          {"pooling", PoolingName(c.pooling)},
          {"preprocess", PreprocessName(c.preprocess)},
          {"margin", c.margin},
          {"nota", c.nota},
          {"max_span_length", c.max_span_length},
          {"seed", c.seed},
          {"mention_loss_weight", c.mention_loss_weight},
          {"relation_loss_weight", c.relation_loss_weight},
          {"patience", c.patience},
          {"stop_at_dev_f1", c.stop_at_dev_f1},
          {"encoder", EncoderKindName(c.encoder)},
          {"hidden_size", c.hidden_size},
          {"window", c.window},
          {"stride", c.stride},
          {"vocab", c.vocab},
          {"lowercase", c.lowercase}};
}

TrainConfig LoadTrainConfig(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return TrainConfigFromJson(j);
}

ModelConfig ToModelConfig(const TrainConfig &c) {
  ModelConfig m;
  m.encoder.kind = c.encoder;
  m.encoder.hidden_size = c.hidden_size;
  m.encoder.window = c.window;
  m.encoder.stride = c.stride;
  m.mention.max_span_length = c.max_span_length;
  m.mention.pooling = c.pooling;
  m.mention.k = c.k_eval_test;
  m.mention.downsample = c.downsample;
  m.mention.margin = c.margin;
  m.nota = c.nota;
  m.preprocess = c.preprocess;
  return m;
}

json EpochRecord::ToJson() const {
  return {{"epoch", epoch},
          {"loss", loss},
          {"mention_loss", mention_loss},
          {"relation_loss", relation_loss},
          {"learning_rate", learning_rate},
          {"max_grad_norm", max_grad_norm},
          {"dev", mathlink::ToJson(dev)},
          {"improved", improved}};
}

RunMetrics TrainResult::Metrics() const {
  const auto &strict = best_dev.strict.overall;
  const auto &iou = best_dev.iou.overall;
  RunMetrics m = {
      {"best_epoch", static_cast<double>(best.epoch)},
      {"re_micro_precision", strict.micro.precision},
      {"re_micro_recall", strict.micro.recall},
      {"re_micro_f1", strict.micro.f1},
      {"re_macro_f1", strict.macro.f1},
      {"re_iou_micro_f1", iou.micro.f1},
      {"ner_strict_f1", best_dev.ner.strict.f1},
      {"ner_exact_f1", best_dev.ner.exact.f1},
      {"ner_partial_f1", best_dev.ner.partial.f1},
      {"ner_type_f1", best_dev.ner.type.f1},
  };
  if (best_dev.entity_recall.total > 0) {
    m["entity_recall"] =
        static_cast<double>(best_dev.entity_recall.found) / best_dev.entity_recall.total;
  }
  return m;
}

json TrainResult::RunLog() const {
  json epochs_json = json::array();
  for (const auto &e : epochs) epochs_json.push_back(e.ToJson());
  json metrics = json::object();
  for (const auto &[name, value] : Metrics()) metrics[name] = value;
  return {{"seed", best.config_snapshot.value("seed", uint64_t{0})},
          {"config", best.config_snapshot},
          {"best_epoch", best.epoch},
          {"early_stopped", early_stopped},
          {"metrics", metrics},
          {"dev", best_dev.ToJson()},
          {"epochs", epochs_json}};
}

TrainResult Train(const TrainConfig &config, const std::vector<RawDocument> &train,
                  const std::vector<RawDocument> &dev, const EpochCallback &on_epoch) {
  ValidateTrainConfig(config);
  if (train.empty()) throw ValidationError("training corpus is empty");
  if (dev.empty()) throw ValidationError("dev corpus is empty");

  Model model(ToModelConfig(config), MakeTokenizer(config), config.seed);
  const std::vector<PreparedDocument> train_docs =
      PrepareCorpus(train, model.tokenizer(), config.preprocess);
  const std::vector<PreparedDocument> dev_docs =
      PrepareCorpus(dev, model.tokenizer(), config.preprocess);

  const int64_t steps_per_epoch =
      (static_cast<int64_t>(train_docs.size()) + config.batch_size - 1) / config.batch_size;
  const LinearWarmupDecay schedule(config.learning_rate, steps_per_epoch * config.warmup_epochs,
                                   steps_per_epoch * config.epochs);
  AdamW::Options options;
  options.weight_decay = config.weight_decay;
  AdamW optimizer(model.Parameters(), options);
  const std::vector<NamedParameter> params = model.Parameters();

  std::mt19937_64 shuffle_rng(config.seed ^ kShuffleStream);
  std::mt19937_64 sample_rng(config.seed ^ kSampleStream);
  std::vector<size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), size_t{0});

  TrainingSettings settings;
  settings.k = config.k_train;
  settings.downsample = config.downsample;
  settings.mention_weight = config.mention_loss_weight;
  settings.relation_weight = config.relation_loss_weight;

  TrainResult result;
  result.best.config_snapshot = ToJson(config);
  double best_f1 = -1.0;
  int since_best = 0;
  int64_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochRecord record;
    record.epoch = epoch;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      settings.gradient_scale = 1.0 / static_cast<double>(end - begin);
      optimizer.ZeroGrad();
      for (size_t i = begin; i < end; ++i) {
        const PreparedDocument &doc = train_docs[order[i]];
        const DocumentLoss loss = AccumulateDocumentGradients(model, doc, settings, sample_rng);
        if (!std::isfinite(loss.total)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch << ", step " << step << ", document "
              << doc.id << " (mention " << loss.mention << ", relation " << loss.relation
              << ", candidates " << loss.candidates << ", pairs " << loss.pairs << ")";
          throw DivergenceError(msg.str());
        }
        const double weight = 1.0 / static_cast<double>(train_docs.size());
        record.loss += weight * loss.total;
        record.mention_loss += weight * loss.mention;
        record.relation_loss += weight * loss.relation;
      }
      const double norm = ClipGradNorm(params, config.max_grad_norm);
      if (!std::isfinite(norm)) {
        throw DivergenceError("non-finite gradient norm at epoch " + std::to_string(epoch) +
                              ", step " + std::to_string(step));
      }
      record.max_grad_norm = std::max(record.max_grad_norm, norm);
      record.learning_rate = schedule.LearningRate(step);
      optimizer.Step(record.learning_rate);
      ++step;
    }

    const EvaluationReport report = EvaluateModel(model, dev_docs, config.k_eval_dev);
    record.dev = report.strict.overall.micro;
    record.improved = record.dev.f1 > best_f1;
    if (record.improved) {
      best_f1 = record.dev.f1;
      since_best = 0;
      result.best.model = model;
      result.best.best_dev_f1 = record.dev.f1;
      result.best.epoch = epoch;
      result.best_dev = report;
    } else {
      ++since_best;
    }
    result.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    if (best_f1 >= config.stop_at_dev_f1) break;
    if (since_best >= config.patience) {
      result.early_stopped = epoch < config.epochs;
      break;
    }
  }
  return result;
}

SeedsReport RunSeedsAggregate(const TrainConfig &config, const std::vector<RawDocument> &train,
                              const std::vector<RawDocument> &dev,
                              const std::vector<uint64_t> &seeds,
                              const std::optional<std::filesystem::path> &log_dir) {
  if (seeds.size() < 2) throw ConfigError("aggregation needs at least two seeds");
  if (log_dir) std::filesystem::create_directories(*log_dir);
  SeedsReport report;
  std::vector<RunMetrics> metrics;
  for (uint64_t seed : seeds) {
    TrainConfig run_config = config;
    run_config.seed = seed;
    TrainResult run = Train(run_config, train, dev);
    metrics.push_back(run.Metrics());
    if (log_dir) {
      std::ofstream out(*log_dir / ("run_" + std::to_string(seed) + ".json"),
                        std::ios::binary | std::ios::trunc);
      if (!out) throw FormatError("cannot write run log into " + log_dir->string());
      out << run.RunLog().dump(2) << "\n";
    }
    report.runs.push_back(std::move(run));
  }
  report.summary = AggregateRuns(metrics);
  return report;
}

}  // namespace mathlink
