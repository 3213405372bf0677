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

#ifndef MATHLINK_PREDICT_H_
#define MATHLINK_PREDICT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mathlink/align.h"
#include "mathlink/corpus.h"
#include "mathlink/eval.h"
#include "mathlink/model.h"

namespace mathlink {

// Relaxed relation matching threshold used unless the caller overrides it.
inline constexpr double kDefaultIouThreshold = 0.67;

struct PredictedMention {
  std::string id;
  EntityType type = EntityType::kSymbol;
  CharSpan span;  // code-point offsets into the original text
};

struct PredictedRelation {
  RelationType type = RelationType::kDirect;
  int head = 0;  // index into DocumentPrediction::mentions
  int tail = 0;
  double score = 0.0;
};

struct DocumentPrediction {
  std::string id;
  Domain domain = Domain::kUnknown;
  std::string text;  // original UTF-8 input
  std::vector<PredictedMention> mentions;
  std::vector<PredictedRelation> relations;
  int type_conflicts = 0;
};

// Full inference from raw text: preprocess, encode, score spans, keep the
// top k, classify pairs, deduplicate and type. Empty input gives an empty
// prediction.
DocumentPrediction PredictDocument(const Model &model, std::string_view text, int k,
                                   std::string id = "document", Domain domain = Domain::kUnknown);
DocumentPrediction PredictDocument(const Model &model, const RawDocument &doc, int k);

nlohmann::json ToJson(const DocumentPrediction &prediction);
DocumentPrediction PredictionFromJson(const nlohmann::json &json);
void SavePredictions(std::span<const DocumentPrediction> predictions,
                     const std::filesystem::path &path);
std::vector<DocumentPrediction> LoadPredictions(const std::filesystem::path &path);

// Gold relations of a prepared document in token space. Relations with an
// endpoint that could not be aligned keep an empty sentinel span so they
// still count towards recall.
std::vector<RelationInstance> GoldRelationInstances(const PreparedDocument &doc);
// Distinct aligned gold mentions that take part in a relation, with their
// annotated types.
std::vector<TypedMention> GoldMentions(const PreparedDocument &doc);
// Distinct aligned gold entity spans.
std::vector<TokenSpan> GoldSpans(const PreparedDocument &doc);

struct EvaluationReport {
  ReScores strict;
  ReScores iou;
  double iou_threshold = kDefaultIouThreshold;
  NerScores ner;
  RecallCounts entity_recall;  // only filled by in-model evaluation

  nlohmann::json ToJson() const;
};

// Runs the model over prepared documents at a fixed k and scores it.
EvaluationReport EvaluateModel(const Model &model, std::span<const PreparedDocument> docs, int k,
                               double iou_threshold = kDefaultIouThreshold);

// Scores prediction files against a gold corpus. Both sides are mapped to
// token spans of the original text with a plain word tokenizer. Documents
// are matched by id; gold documents without a prediction count as empty
// predictions.
EvaluationReport EvaluatePredictions(std::span<const DocumentPrediction> predictions,
                                     std::span<const RawDocument> gold,
                                     double iou_threshold = kDefaultIouThreshold);

struct SweepRow {
  int k = 0;
  Prf relation;          // micro, strict matching
  double entity_recall = 0.0;
};

// Encodes and scores each document once, then decodes it for every k.
std::vector<SweepRow> KSweep(const Model &model, std::span<const PreparedDocument> docs,
                             std::span<const int> ks);
std::vector<int> SweepRange(int k_min, int k_max, int k_step);
// Percentages with four decimals; header k,p,r,f,entity_recall.
std::string SweepCsv(std::span<const SweepRow> rows);

}  // namespace mathlink

#endif  // MATHLINK_PREDICT_H_
