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

#ifndef MATHLINK_RELATION_H_
#define MATHLINK_RELATION_H_

#include <bitset>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mathlink/parameter.h"
#include "mathlink/types.h"

namespace mathlink {

// Gold relation types of one ordered pair; empty means unrelated.
using RelationLabelSet = std::bitset<kNumRelationTypes>;

// Prototypes over concatenated (head, tail) span embeddings: one per
// relation type plus `nota` none-of-the-above vectors, each 2d wide.
class RelationPrototypeBank {
 public:
  RelationPrototypeBank() = default;
  RelationPrototypeBank(int hidden_size, int nota, std::mt19937_64 &rng);

  const Matrix &relations() const { return relations_.value; }
  const Matrix &nota() const { return nota_.value; }
  Parameter &relation_parameter() { return relations_; }
  Parameter &nota_parameter() { return nota_; }

  int num_nota() const { return static_cast<int>(nota_.value.rows()); }
  int pair_size() const { return static_cast<int>(relations_.value.cols()); }
  // Logit columns: relation types first, then NOTA.
  int num_logits() const { return kNumRelationTypes + num_nota(); }

 private:
  Parameter relations_;
  Parameter nota_;
};

// Ordered pair of candidate indices.
struct CandidatePair {
  int head = 0;
  int tail = 0;
};

inline int64_t PairCount(int64_t num_candidates) {
  return num_candidates < 2 ? 0 : num_candidates * (num_candidates - 1);
}

// Every ordered pair of distinct candidates, head-major.
std::vector<CandidatePair> BuildPairs(int num_candidates);

// Row p is concat(e_head, e_tail) for pairs[p].
Matrix BuildPairRepresentations(const Matrix &candidates, std::span<const CandidatePair> pairs);

// Logits from explicit pair representations: reps * [relations; nota]^T.
Matrix PairLogitsFromRepresentations(const Matrix &representations,
                                     const RelationPrototypeBank &bank);

// Same logits without materializing representations: the dot product with
// a concatenation splits into a head half and a tail half.
Matrix ScorePairs(const Matrix &candidates, std::span<const CandidatePair> pairs,
                  const RelationPrototypeBank &bank);

// Threshold logit of one row: the largest NOTA logit.
double ThresholdLogit(const Eigen::Ref<const RowVector> &logits);

struct RelationPrediction {
  TokenSpan head;
  TokenSpan tail;
  RelationType type = RelationType::kDirect;
  double score = 0.0;  // winning logit minus the threshold logit

  bool operator==(const RelationPrediction &) const = default;
};

// The relation type whose logit beats every NOTA logit, with its margin, or
// nullopt when a NOTA prototype wins (ties go to NOTA).
std::optional<std::pair<RelationType, double>> ClassifyPair(
    const Eigen::Ref<const RowVector> &logits);

std::vector<RelationPrediction> PredictRelations(const Matrix &logits,
                                                 std::span<const CandidatePair> pairs,
                                                 std::span<const TokenSpan> candidate_spans);

struct AtlResult {
  double loss = 0.0;
  RowVector grad;  // dLoss/dLogits over the relation + NOTA columns
};

// Adaptive thresholding loss with the threshold class taken as the best
// NOTA logit. Positives are pushed above it, the remaining relation types
// below it.
AtlResult AdaptiveThresholdingLoss(const Eigen::Ref<const RowVector> &logits,
                                   RelationLabelSet positives);

struct RelationLossResult {
  double loss = 0.0;  // mean over pairs
  Matrix grad_candidates;
  Matrix grad_relations;
  Matrix grad_nota;
};

RelationLossResult RelationLoss(const Matrix &candidates, std::span<const CandidatePair> pairs,
                                std::span<const RelationLabelSet> labels,
                                const RelationPrototypeBank &bank);

// Order used for deduplication and output: score descending, then head,
// tail and type ascending.
bool PredictionRanksBefore(const RelationPrediction &a, const RelationPrediction &b);

// Greedy suppression in rank order: a prediction is dropped when an already
// kept prediction of the same type overlaps it in both head and tail.
// Survivors are returned in rank order.
std::vector<RelationPrediction> DeduplicatePredictions(std::vector<RelationPrediction> preds);

}  // namespace mathlink

#endif  // MATHLINK_RELATION_H_
