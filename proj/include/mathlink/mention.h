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

#ifndef MATHLINK_MENTION_H_
#define MATHLINK_MENTION_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mathlink/parameter.h"
#include "mathlink/types.h"

namespace mathlink {

enum class Pooling { kMean, kMax };

std::string_view PoolingName(Pooling pooling);
std::optional<Pooling> ParsePooling(std::string_view name);

struct MentionConfig {
  int max_span_length = 16;  // n
  Pooling pooling = Pooling::kMax;
  int k = 50;                // candidates forwarded to relation extraction
  int downsample = 1000;     // D, training-time candidate budget
  double margin = 1.0;       // triplet hinge margin
};

// All spans with 1 <= length <= min(max_length, num_tokens), ordered by
// start then length.
std::vector<TokenSpan> EnumerateSpans(int num_tokens, int max_length);

// Closed-form size of EnumerateSpans.
int64_t CountSpans(int num_tokens, int max_length);

Vector PoolSpan(const Matrix &tokens, TokenSpan span, Pooling pooling);

struct PooledSpans {
  Matrix embeddings;       // one row per span
  std::vector<int> argmax;  // max pooling: winning token per (span, dim), row-major
};

PooledSpans PoolSpans(const Matrix &tokens, std::span<const TokenSpan> spans, Pooling pooling);

// Adds dLoss/dTokens given dLoss/dSpanEmbeddings. Max pooling routes each
// component's gradient to the first maximal token.
void PoolSpansBackward(const PooledSpans &pooled, std::span<const TokenSpan> spans,
                       Pooling pooling, const Matrix &grad_spans, Matrix *grad_tokens);

// One trainable prototype per entity type, row index = EntityType value.
class EntityPrototypeBank {
 public:
  EntityPrototypeBank() = default;
  EntityPrototypeBank(int hidden_size, std::mt19937_64 &rng);

  const Matrix &prototypes() const { return prototypes_.value; }
  Parameter &parameter() { return prototypes_; }
  int hidden_size() const { return static_cast<int>(prototypes_.value.cols()); }

 private:
  Parameter prototypes_;
};

// Max over prototypes of the dot product with each span embedding. Throws
// ContractError when dimensions disagree.
Vector ScoreSpans(const Matrix &span_embeddings, const Matrix &prototypes);

// Strict weak order: score descending, then start ascending, then length
// ascending.
bool RanksBefore(double score_a, TokenSpan a, double score_b, TokenSpan b);

// Candidate indices sorted by RanksBefore.
std::vector<int> RankSpans(std::span<const double> scores, std::span<const TokenSpan> spans);

// The k best-ranked indices in rank order, followed by every index in
// `forced` that is not already among them (training-time gold injection).
std::vector<int> SelectTopK(std::span<const double> scores, std::span<const TokenSpan> spans,
                            int k, std::span<const int> forced = {});

// Keeps every gold index and fills up to `budget` with a uniform sample of
// the rest. Returns sorted indices. Throws ConfigError if the gold set alone
// exceeds the budget.
std::vector<int> DownsampleTrainingCandidates(int num_spans, std::span<const int> gold,
                                              int budget, std::mt19937_64 &rng);

struct MentionLossResult {
  double loss = 0.0;
  int64_t pairs = 0;
  Matrix grad_embeddings;  // same shape as the candidate matrix
  Matrix grad_prototypes;  // same shape as the prototype matrix
};

// Mean over every (known-true i, other j) pair within the candidate set of
//   max(0, margin - <p_i, e_i> + <p_i, e_j>)
// where p_i is the prototype of candidate i's gold type. labels[i] is empty
// for candidates not known to be mentions. Zero, with zero gradients, when
// either side of the partition is empty.
MentionLossResult MentionLoss(const Matrix &candidates,
                              std::span<const std::optional<EntityType>> labels,
                              const Matrix &prototypes, double margin);

}  // namespace mathlink

#endif  // MATHLINK_MENTION_H_
