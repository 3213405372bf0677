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

#ifndef MATHLINK_EVAL_H_
#define MATHLINK_EVAL_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "mathlink/relation.h"
#include "mathlink/typing.h"
#include "mathlink/types.h"

namespace mathlink {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean; 0 when both inputs are 0.
double F1Score(double precision, double recall);

// |a ∩ b| / |a ∪ b| over token index sets.
double SpanIou(TokenSpan a, TokenSpan b);

// ---------------------------------------------------------------------------
// Entity extraction, scored with the SemEval-2013 Task 9.1 matching modes:
//   strict  - boundaries and type exact
//   exact   - boundaries exact, type ignored
//   partial - overlapping boundaries earn half credit
//   type    - type must match, boundaries need only overlap

enum class NerMode : int { kStrict = 0, kExact = 1, kPartial = 2, kType = 3 };

struct NerCounts {
  int64_t correct = 0;
  int64_t incorrect = 0;
  int64_t partial = 0;
  int64_t missed = 0;
  int64_t spurious = 0;

  int64_t possible() const { return correct + incorrect + partial + missed; }
  int64_t actual() const { return correct + incorrect + partial + spurious; }
};

struct NerScores {
  Prf strict;
  Prf exact;
  Prf partial;
  Prf type;
};

// Micro-averaged accumulator across documents.
class NerTally {
 public:
  // Each prediction is judged against the first gold mention it matches
  // exactly or overlaps; gold mentions never touched count as missed.
  void Add(std::span<const TypedMention> predicted, std::span<const TypedMention> gold);
  const NerCounts &counts(NerMode mode) const { return counts_[static_cast<int>(mode)]; }
  NerScores Scores() const;

 private:
  std::array<NerCounts, 4> counts_;
};

NerScores NerEvaluate(std::span<const TypedMention> predicted, std::span<const TypedMention> gold);

// ---------------------------------------------------------------------------
// Relation extraction.

struct RelationInstance {
  TokenSpan head;
  TokenSpan tail;
  RelationType type = RelationType::kDirect;

  auto operator<=>(const RelationInstance &) const = default;
};

struct DocumentRelations {
  Domain domain = Domain::kUnknown;
  std::vector<RelationPrediction> predicted;
  std::vector<RelationInstance> gold;
};

struct MatchSpec {
  enum class Mode { kStrict, kIou };
  Mode mode = Mode::kStrict;
  std::optional<double> iou_threshold;  // required for kIou, in (0, 1]

  static MatchSpec Strict() { return {}; }
  static MatchSpec Iou(double threshold) { return {Mode::kIou, threshold}; }
};

struct RelationCounts {
  int64_t true_positives = 0;
  int64_t predicted = 0;
  int64_t gold = 0;
};

struct ReBreakdown {
  Prf micro;
  // Unweighted mean over relation types present in the gold data.
  Prf macro;
  std::map<RelationType, Prf> per_type;
  std::map<RelationType, RelationCounts> counts;
  RelationCounts total;
};

struct ReScores {
  ReBreakdown overall;
  std::map<Domain, ReBreakdown> per_domain;
};

// Strict: a prediction is a true positive iff head, tail and type equal a
// not-yet-credited gold instance. Iou: predictions left unmatched by the
// strict pass may, in descending score order, claim a remaining gold
// instance of the same type whose head and tail IOU both exceed the
// threshold. Throws ConfigError when kIou lacks a threshold.
ReScores ReEvaluate(std::span<const DocumentRelations> docs, const MatchSpec &match);

// Per-document matching; exposed for tests.
std::map<RelationType, RelationCounts> MatchRelations(const DocumentRelations &doc,
                                                      const MatchSpec &match);

// ---------------------------------------------------------------------------
// Entity recall of a ranked candidate list.

struct RecallCounts {
  int64_t found = 0;
  int64_t total = 0;
};

// Distinct gold spans found among the k best-ranked candidates (same order
// as top-k selection).
RecallCounts EntityRecallCounts(std::span<const double> scores,
                                std::span<const TokenSpan> spans,
                                std::span<const TokenSpan> gold, int k);

// Throws UndefinedRateError when there are no gold spans.
double EntityRecallAtK(std::span<const double> scores, std::span<const TokenSpan> spans,
                       std::span<const TokenSpan> gold, int k);

nlohmann::json ToJson(const Prf &prf);
nlohmann::json ToJson(const NerScores &scores);
nlohmann::json ToJson(const ReBreakdown &scores);
nlohmann::json ToJson(const ReScores &scores);

}  // namespace mathlink

#endif  // MATHLINK_EVAL_H_
