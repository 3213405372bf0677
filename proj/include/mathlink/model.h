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

#ifndef MATHLINK_MODEL_H_
#define MATHLINK_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <vector>

#include "json.hpp"
#include "mathlink/align.h"
#include "mathlink/encoder.h"
#include "mathlink/mention.h"
#include "mathlink/relation.h"
#include "mathlink/tokenizer.h"
#include "mathlink/typing.h"

namespace mathlink {

struct ModelConfig {
  EncoderConfig encoder;
  MentionConfig mention;
  int nota = 4;  // m
  Preprocess preprocess = Preprocess::kNone;
};

nlohmann::json ToJson(const ModelConfig &config);
ModelConfig ModelConfigFromJson(const nlohmann::json &json);

// Encoder, entity prototypes and relation prototypes plus the tokenizer and
// preprocessing that feed them.
class Model {
 public:
  Model() = default;
  Model(const ModelConfig &config, Tokenizer tokenizer, uint64_t seed);
  Model(const Model &other);
  Model &operator=(const Model &other);
  Model(Model &&) = default;
  Model &operator=(Model &&) = default;

  const ModelConfig &config() const { return config_; }
  const Tokenizer &tokenizer() const { return tokenizer_; }
  const Encoder &encoder() const { return *encoder_; }
  Encoder &encoder() { return *encoder_; }
  const EntityPrototypeBank &entity_bank() const { return entity_bank_; }
  EntityPrototypeBank &entity_bank() { return entity_bank_; }
  const RelationPrototypeBank &relation_bank() const { return relation_bank_; }
  RelationPrototypeBank &relation_bank() { return relation_bank_; }

  std::vector<NamedParameter> Parameters();

  PreparedDocument Prepare(const RawDocument &doc) const;
  TokenizedDocument TokenizeText(std::u32string_view text) const;

 private:
  ModelConfig config_;
  Tokenizer tokenizer_;
  std::unique_ptr<Encoder> encoder_;
  EntityPrototypeBank entity_bank_;
  RelationPrototypeBank relation_bank_;
};

// Every enumerated span of a document with its pooled embedding and score.
struct SpanAnalysis {
  std::vector<TokenSpan> spans;
  Matrix embeddings;
  Vector scores;
};

SpanAnalysis AnalyzeSpans(const Model &model, const TokenizedDocument &tokens);

struct DecodedDocument {
  std::vector<TokenSpan> candidates;           // top-k, rank order
  std::vector<RelationPrediction> relations;   // deduplicated
  TypingResult typing;
};

// Top-k selection, pair classification, deduplication and typing.
DecodedDocument Decode(const Model &model, const SpanAnalysis &analysis, int k);

struct TrainingSettings {
  int k = 50;
  int downsample = 1000;
  double mention_weight = 1.0;
  double relation_weight = 1.0;
  // Multiplies the document loss before backprop, e.g. 1 / batch size.
  double gradient_scale = 1.0;
};

struct DocumentLoss {
  double total = 0.0;
  double mention = 0.0;
  double relation = 0.0;
  int candidates = 0;
  int64_t pairs = 0;
};

// Forward and backward pass for one document. Adds gradients into the
// model's parameters; the caller zeroes them between optimizer steps.
DocumentLoss AccumulateDocumentGradients(Model &model, const PreparedDocument &doc,
                                         const TrainingSettings &settings,
                                         std::mt19937_64 &rng);

struct Checkpoint {
  Model model;
  nlohmann::json config_snapshot = nlohmann::json::object();
  double best_dev_f1 = 0.0;
  int epoch = 0;
};

// Atomic: written to a sibling temporary file, then renamed.
void SaveCheckpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
Checkpoint LoadCheckpoint(const std::filesystem::path &path);

nlohmann::json CheckpointToJson(const Checkpoint &checkpoint);
Checkpoint CheckpointFromJson(const nlohmann::json &json);

}  // namespace mathlink

#endif  // MATHLINK_MODEL_H_
