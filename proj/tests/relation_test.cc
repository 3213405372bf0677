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

// Tests for pair construction, pair logits, the adaptive thresholding loss
// and prediction deduplication.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mathlink/errors.h"
#include "mathlink/relation.h"
#include "test_util.h"

namespace mathlink {
namespace {

using testing::MaxGradientError;
using testing::RandomInt;
using testing::RandomMatrix;

RelationPrototypeBank RandomBank(std::mt19937_64 &rng, int hidden, int nota) {
  RelationPrototypeBank bank(hidden, nota, rng);
  bank.relation_parameter().value = RandomMatrix(rng, kNumRelationTypes, 2 * hidden);
  bank.nota_parameter().value = RandomMatrix(rng, nota, 2 * hidden);
  return bank;
}

RowVector Row(std::initializer_list<double> values) {
  RowVector row(static_cast<Eigen::Index>(values.size()));
  int i = 0;
  for (double v : values) row(i++) = v;
  return row;
}

// ---------------------------------------------------------------------------
// Pairs and logits.

TEST_CASE("pair budget is k(k-1)", "[relation][pairs]") {
  CHECK(BuildPairs(0).empty());
  CHECK(BuildPairs(1).empty());
  CHECK(BuildPairs(50).size() == 2450);
  CHECK(PairCount(50) == 2450);
  for (const CandidatePair &p : BuildPairs(7)) CHECK(p.head != p.tail);
}

TEST_CASE("pair representations concatenate head and tail", "[relation][pairs]") {
  Matrix candidates(2, 2);
  candidates << 1, 2, 3, 4;
  const std::vector<CandidatePair> pairs = {{0, 1}, {1, 0}};
  const Matrix reps = BuildPairRepresentations(candidates, pairs);
  CHECK(reps.row(0) == Row({1, 2, 3, 4}));
  CHECK(reps.row(1) == Row({3, 4, 1, 2}));
}

TEST_CASE("decomposed pair scoring equals explicit dot products", "[relation][logits]") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int hidden = RandomInt(rng, 1, 8);
    const int nota = RandomInt(rng, 1, 5);
    const RelationPrototypeBank bank = RandomBank(rng, hidden, nota);
    const Matrix candidates = RandomMatrix(rng, RandomInt(rng, 2, 9), hidden);
    const auto pairs = BuildPairs(static_cast<int>(candidates.rows()));
    const Matrix reps = BuildPairRepresentations(candidates, pairs);
    const Matrix logits = ScorePairs(candidates, pairs, bank);
    REQUIRE(logits.cols() == kNumRelationTypes + nota);
    for (size_t p = 0; p < pairs.size(); ++p) {
      for (int c = 0; c < logits.cols(); ++c) {
        const RowVector proto =
            c < kNumRelationTypes ? bank.relations().row(c) : bank.nota().row(c - kNumRelationTypes);
        double dot = 0.0;
        for (int i = 0; i < 2 * hidden; ++i) dot += reps(p, i) * proto(i);
        REQUIRE(std::abs(logits(p, c) - dot) <= 1e-10 * std::max(1.0, std::abs(dot)));
      }
    }
    REQUIRE((PairLogitsFromRepresentations(reps, bank) - logits).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pair logits edge cases", "[relation][logits]") {
  std::mt19937_64 rng(2);
  const RelationPrototypeBank bank = RandomBank(rng, 3, 4);
  const Matrix zero = Matrix::Zero(1, 6);
  const Matrix logits = PairLogitsFromRepresentations(zero, bank);
  CHECK(logits.isZero());
  CHECK(ThresholdLogit(logits.row(0)) == 0.0);
  CHECK_THROWS_AS(PairLogitsFromRepresentations(Matrix::Zero(1, 5), bank), ContractError);

  const Matrix reps = RandomMatrix(rng, 1, 6);
  CHECK((PairLogitsFromRepresentations(reps * 2.5, bank) -
         2.5 * PairLogitsFromRepresentations(reps, bank))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

// ---------------------------------------------------------------------------
// Classification.

TEST_CASE("classification worked examples", "[relation][predict]") {
  // Columns: Direct, Count, Corefer-Symbol, Corefer-Description, 2 x NOTA.
  const auto direct = ClassifyPair(Row({5.0, 1.0, 0.5, -1.0, 1.0, 0.2}));
  REQUIRE(direct);
  CHECK(direct->first == RelationType::kDirect);
  CHECK(direct->second == 4.0);
  CHECK_FALSE(ClassifyPair(Row({0.0, 1.0, 0.5, -1.0, 3.0, 0.2})));
  // A tie with the threshold goes to NOTA.
  CHECK_FALSE(ClassifyPair(Row({3.0, 1.0, 0.5, -1.0, 3.0, 0.2})));
}

TEST_CASE("classification equals an argmax over all prototypes", "[relation][predict]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int nota = RandomInt(rng, 1, 4);
    const RowVector logits = RandomMatrix(rng, 1, kNumRelationTypes + nota, 2.0);
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c) {
      if (logits(c) > logits(best)) best = c;
    }
    const auto result = ClassifyPair(logits);
    if (best >= kNumRelationTypes) {
      REQUIRE_FALSE(result);
    } else {
      REQUIRE(result);
      REQUIRE(static_cast<int>(result->first) == best);
      REQUIRE(result->second == logits(best) - logits.tail(nota).maxCoeff());
      REQUIRE(result->second > 0.0);
    }
  }
}

TEST_CASE("predictions carry spans and only beat the threshold", "[relation][predict]") {
  std::mt19937_64 rng(4);
  const std::vector<TokenSpan> spans = {{0, 1}, {2, 4}, {5, 6}, {6, 9}};
  const auto pairs = BuildPairs(4);
  const Matrix logits = RandomMatrix(rng, static_cast<int>(pairs.size()), 6, 2.0);
  const auto preds = PredictRelations(logits, pairs, spans);
  size_t expected = 0;
  for (size_t p = 0; p < pairs.size(); ++p) {
    if (ClassifyPair(logits.row(p))) ++expected;
  }
  CHECK(preds.size() == expected);
  for (const RelationPrediction &pred : preds) {
    CHECK(pred.score > 0.0);
    CHECK(pred.head != pred.tail);
  }
  Matrix nota_wins = logits;
  nota_wins.rightCols(2).array() += 100.0;
  CHECK(PredictRelations(nota_wins, pairs, spans).empty());
}

// ---------------------------------------------------------------------------
// Adaptive thresholding loss.

RelationLabelSet Labels(std::initializer_list<RelationType> types) {
  RelationLabelSet set;
  for (RelationType t : types) set.set(static_cast<size_t>(t));
  return set;
}

// Direct transcription of the two loss terms with log-sum-exp evaluated
// naively in long double.
double ReferenceAtl(const RowVector &logits, RelationLabelSet positives) {
  const long double threshold = logits.tail(logits.cols() - kNumRelationTypes).maxCoeff();
  long double pos_sum = std::exp(threshold), neg_sum = std::exp(threshold);
  for (int r = 0; r < kNumRelationTypes; ++r) {
    (positives.test(r) ? pos_sum : neg_sum) += std::exp(static_cast<long double>(logits(r)));
  }
  long double l1 = 0.0;
  for (int r = 0; r < kNumRelationTypes; ++r) {
    if (positives.test(r)) l1 -= logits(r) - std::log(pos_sum);
  }
  const long double l2 = -(threshold - std::log(neg_sum));
  return static_cast<double>(l1 + l2);
}

TEST_CASE("ATL worked examples", "[relation][atl]") {
  // No positives, threshold 20 above every negative.
  const auto separated = AdaptiveThresholdingLoss(Row({-20, -20, -21, -25, 0, -3}), {});
  CHECK(separated.loss < 1e-8);
  CHECK(separated.loss >= 0.0);

  // One positive tied with the threshold; negatives far below.
  const auto tie = AdaptiveThresholdingLoss(Row({2.0, -1e3, -1e3, -1e3, 2.0, -1e3}),
                                            Labels({RelationType::kDirect}));
  CHECK(tie.loss == Catch::Approx(std::log(2.0)).margin(1e-12));

  // All four types positive: the negative term sees only the threshold.
  const auto all = AdaptiveThresholdingLoss(Row({1, 2, 3, 4, 0.5}),
                                            Labels({RelationType::kDirect, RelationType::kCount,
                                                    RelationType::kCoreferSymbol,
                                                    RelationType::kCoreferDescription}));
  CHECK(std::isfinite(all.loss));
}

TEST_CASE("ATL equals the reference formula", "[relation][atl][property]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int nota = RandomInt(rng, 1, 4);
    const RowVector logits = RandomMatrix(rng, 1, kNumRelationTypes + nota, 3.0);
    RelationLabelSet positives(static_cast<unsigned long>(RandomInt(rng, 0, 15)));
    const auto result = AdaptiveThresholdingLoss(logits, positives);
    REQUIRE(result.loss >= 0.0);
    REQUIRE(std::abs(result.loss - ReferenceAtl(logits, positives)) < 1e-9);
  }
}

TEST_CASE("ATL gradients match finite differences", "[relation][atl][gradient]") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int nota = RandomInt(rng, 1, 4);
    Matrix logits = RandomMatrix(rng, 1, kNumRelationTypes + nota, 2.0);
    const RelationLabelSet positives(static_cast<unsigned long>(RandomInt(rng, 0, 15)));
    const Matrix analytic = AdaptiveThresholdingLoss(logits.row(0), positives).grad;
    auto loss = [&]() { return AdaptiveThresholdingLoss(logits.row(0), positives).loss; };
    REQUIRE(MaxGradientError(logits, analytic, loss) < 1e-4);
  }
}

TEST_CASE("raising the single gold logit never raises the loss", "[relation][atl][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    RowVector logits = RandomMatrix(rng, 1, kNumRelationTypes + 3, 2.0);
    const int gold = RandomInt(rng, 0, kNumRelationTypes - 1);
    RelationLabelSet positives;
    positives.set(gold);
    double previous = AdaptiveThresholdingLoss(logits, positives).loss;
    for (int step = 0; step < 10; ++step) {
      logits(gold) += std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double next = AdaptiveThresholdingLoss(logits, positives).loss;
      REQUIRE(next <= previous + 1e-12);
      previous = next;
    }
  }
}

TEST_CASE("empty positive set leaves only the negative term", "[relation][atl]") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const RowVector logits = RandomMatrix(rng, 1, kNumRelationTypes + 2, 2.0);
    const auto result = AdaptiveThresholdingLoss(logits, {});
    const double threshold = logits.tail(2).maxCoeff();
    double sum = std::exp(threshold);
    for (int r = 0; r < kNumRelationTypes; ++r) sum += std::exp(logits(r));
    REQUIRE(result.loss == Catch::Approx(std::log(sum) - threshold).epsilon(1e-12));
  }
}

TEST_CASE("relation loss averages ATL over pairs and backpropagates",
          "[relation][atl][gradient]") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const int hidden = 3;
    RelationPrototypeBank bank = RandomBank(rng, hidden, 2);
    Matrix candidates = RandomMatrix(rng, RandomInt(rng, 2, 5), hidden);
    const auto pairs = BuildPairs(static_cast<int>(candidates.rows()));
    std::vector<RelationLabelSet> labels(pairs.size());
    for (auto &l : labels) {
      if (RandomInt(rng, 0, 3) == 0) l.set(RandomInt(rng, 0, kNumRelationTypes - 1));
    }
    const auto result = RelationLoss(candidates, pairs, labels, bank);

    const Matrix logits = ScorePairs(candidates, pairs, bank);
    double mean = 0.0;
    for (size_t p = 0; p < pairs.size(); ++p) {
      mean += AdaptiveThresholdingLoss(logits.row(p), labels[p]).loss / pairs.size();
    }
    REQUIRE(result.loss == Catch::Approx(mean).epsilon(1e-12));

    auto loss = [&]() { return RelationLoss(candidates, pairs, labels, bank).loss; };
    REQUIRE(MaxGradientError(candidates, result.grad_candidates, loss) < 1e-4);
    REQUIRE(MaxGradientError(bank.relation_parameter().value, result.grad_relations, loss) < 1e-4);
    REQUIRE(MaxGradientError(bank.nota_parameter().value, result.grad_nota, loss) < 1e-4);
  }
}

// ---------------------------------------------------------------------------
// Deduplication.

TEST_CASE("deduplication worked examples", "[relation][dedup]") {
  const RelationPrediction p1{{0, 2}, {5, 7}, RelationType::kDirect, 0.9};
  const RelationPrediction p2{{0, 3}, {5, 7}, RelationType::kDirect, 0.8};
  CHECK(DeduplicatePredictions({p2, p1}) == std::vector<RelationPrediction>{p1});

  const RelationPrediction far{{10, 11}, {12, 13}, RelationType::kDirect, 0.5};
  const RelationPrediction other_type{{0, 3}, {5, 7}, RelationType::kCount, 0.7};
  CHECK(DeduplicatePredictions({far, other_type}) ==
        std::vector<RelationPrediction>{other_type, far});
}

// O(n^2) suppression: walk predictions from best to worst and keep one
// unless an already kept prediction of the same type overlaps it at both
// ends.
std::vector<RelationPrediction> ReferenceDedup(std::vector<RelationPrediction> preds) {
  for (size_t i = 0; i < preds.size(); ++i) {
    for (size_t j = i + 1; j < preds.size(); ++j) {
      const auto key = [](const RelationPrediction &p) {
        return std::make_tuple(-p.score, p.head.start, p.head.end, p.tail.start, p.tail.end,
                               static_cast<int>(p.type));
      };
      if (key(preds[j]) < key(preds[i])) std::swap(preds[i], preds[j]);
    }
  }
  std::vector<RelationPrediction> kept;
  for (const RelationPrediction &p : preds) {
    bool suppressed = false;
    for (const RelationPrediction &q : kept) {
      suppressed |= q.type == p.type && Overlaps(q.head, p.head) && Overlaps(q.tail, p.tail);
    }
    if (!suppressed) kept.push_back(p);
  }
  return kept;
}

std::vector<RelationPrediction> RandomPredictions(std::mt19937_64 &rng) {
  std::vector<RelationPrediction> preds;
  const int n = RandomInt(rng, 0, 30);
  auto span = [&]() {
    const int start = RandomInt(rng, 0, 15);
    return TokenSpan{start, start + RandomInt(rng, 1, 4)};
  };
  for (int i = 0; i < n; ++i) {
    preds.push_back({span(), span(), kAllRelationTypes[RandomInt(rng, 0, 1)],
                     RandomInt(rng, 1, 20) / 4.0});
  }
  return preds;
}

TEST_CASE("deduplication equals pairwise suppression", "[relation][dedup][property]") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const auto preds = RandomPredictions(rng);
    const auto once = DeduplicatePredictions(preds);
    REQUIRE(once == ReferenceDedup(preds));
    REQUIRE(DeduplicatePredictions(once) == once);
    for (size_t i = 0; i < once.size(); ++i) {
      for (size_t j = i + 1; j < once.size(); ++j) {
        REQUIRE_FALSE((once[i].type == once[j].type && Overlaps(once[i].head, once[j].head) &&
                       Overlaps(once[i].tail, once[j].tail)));
      }
    }
  }
}

}  // namespace
}  // namespace mathlink
