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

#include "mathlink/relation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "mathlink/errors.h"

namespace mathlink {
namespace {

void CheckDimensions(const Matrix &candidates, const RelationPrototypeBank &bank) {
  if (2 * candidates.cols() != bank.pair_size()) {
    throw ContractError("pair dimension " + std::to_string(2 * candidates.cols()) +
                        " != prototype dimension " + std::to_string(bank.pair_size()));
  }
}

Matrix AllPrototypes(const RelationPrototypeBank &bank) {
  Matrix all(bank.num_logits(), bank.pair_size());
  all.topRows(kNumRelationTypes) = bank.relations();
  all.bottomRows(bank.num_nota()) = bank.nota();
  return all;
}

double LogSumExp(std::span<const double> values) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : values) max = std::max(max, v);
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

}  // namespace

RelationPrototypeBank::RelationPrototypeBank(int hidden_size, int nota, std::mt19937_64 &rng) {
  if (nota < 1) throw ConfigError("at least one NOTA prototype is required");
  relations_.Resize(kNumRelationTypes, 2 * hidden_size);
  nota_.Resize(nota, 2 * hidden_size);
  InitNormal(relations_.value, 0.02, rng);
  InitNormal(nota_.value, 0.02, rng);
}

std::vector<CandidatePair> BuildPairs(int num_candidates) {
  std::vector<CandidatePair> pairs;
  pairs.reserve(static_cast<size_t>(PairCount(num_candidates)));
  for (int h = 0; h < num_candidates; ++h) {
    for (int t = 0; t < num_candidates; ++t) {
      if (h != t) pairs.push_back({h, t});
    }
  }
  return pairs;
}

Matrix BuildPairRepresentations(const Matrix &candidates, std::span<const CandidatePair> pairs) {
  const Eigen::Index d = candidates.cols();
  Matrix reps(static_cast<Eigen::Index>(pairs.size()), 2 * d);
  for (size_t p = 0; p < pairs.size(); ++p) {
    reps.row(p).head(d) = candidates.row(pairs[p].head);
    reps.row(p).tail(d) = candidates.row(pairs[p].tail);
  }
  return reps;
}

Matrix PairLogitsFromRepresentations(const Matrix &representations,
                                     const RelationPrototypeBank &bank) {
  if (representations.cols() != bank.pair_size()) {
    throw ContractError("pair representation width " + std::to_string(representations.cols()) +
                        " != prototype width " + std::to_string(bank.pair_size()));
  }
  return representations * AllPrototypes(bank).transpose();
}

Matrix ScorePairs(const Matrix &candidates, std::span<const CandidatePair> pairs,
                  const RelationPrototypeBank &bank) {
  CheckDimensions(candidates, bank);
  const Eigen::Index d = candidates.cols();
  const Matrix all = AllPrototypes(bank);
  const Matrix head_terms = candidates * all.leftCols(d).transpose();
  const Matrix tail_terms = candidates * all.rightCols(d).transpose();
  Matrix logits(static_cast<Eigen::Index>(pairs.size()), all.rows());
  for (size_t p = 0; p < pairs.size(); ++p) {
    logits.row(p) = head_terms.row(pairs[p].head) + tail_terms.row(pairs[p].tail);
  }
  return logits;
}

double ThresholdLogit(const Eigen::Ref<const RowVector> &logits) {
  return logits.tail(logits.size() - kNumRelationTypes).maxCoeff();
}

std::optional<std::pair<RelationType, double>> ClassifyPair(
    const Eigen::Ref<const RowVector> &logits) {
  const double threshold = ThresholdLogit(logits);
  int best = 0;
  for (int r = 1; r < kNumRelationTypes; ++r) {
    if (logits(r) > logits(best)) best = r;
  }
  if (!(logits(best) > threshold)) return std::nullopt;
  return std::make_pair(static_cast<RelationType>(best), logits(best) - threshold);
}

std::vector<RelationPrediction> PredictRelations(const Matrix &logits,
                                                 std::span<const CandidatePair> pairs,
                                                 std::span<const TokenSpan> candidate_spans) {
  std::vector<RelationPrediction> preds;
  for (size_t p = 0; p < pairs.size(); ++p) {
    if (auto winner = ClassifyPair(logits.row(p))) {
      preds.push_back({candidate_spans[pairs[p].head], candidate_spans[pairs[p].tail],
                       winner->first, winner->second});
    }
  }
  return preds;
}

AtlResult AdaptiveThresholdingLoss(const Eigen::Ref<const RowVector> &logits,
                                   RelationLabelSet positives) {
  const int columns = static_cast<int>(logits.size());
  if (columns <= kNumRelationTypes) throw ContractError("logits need at least one NOTA column");
  AtlResult result;
  result.grad = RowVector::Zero(columns);

  int threshold_column = kNumRelationTypes;
  for (int c = kNumRelationTypes + 1; c < columns; ++c) {
    if (logits(c) > logits(threshold_column)) threshold_column = c;
  }
  const double threshold = logits(threshold_column);

  std::vector<double> values;
  // Positives against the threshold class.
  if (positives.any()) {
    values.clear();
    for (int r = 0; r < kNumRelationTypes; ++r) {
      if (positives.test(r)) values.push_back(logits(r));
    }
    values.push_back(threshold);
    const double lse = LogSumExp(values);
    const double count = static_cast<double>(positives.count());
    for (int r = 0; r < kNumRelationTypes; ++r) {
      if (!positives.test(r)) continue;
      result.loss += lse - logits(r);
      result.grad(r) += count * std::exp(logits(r) - lse) - 1.0;
    }
    result.grad(threshold_column) += count * std::exp(threshold - lse);
  }
  // Threshold class against the negatives.
  values.clear();
  for (int r = 0; r < kNumRelationTypes; ++r) {
    if (!positives.test(r)) values.push_back(logits(r));
  }
  values.push_back(threshold);
  const double lse = LogSumExp(values);
  result.loss += lse - threshold;
  for (int r = 0; r < kNumRelationTypes; ++r) {
    if (!positives.test(r)) result.grad(r) += std::exp(logits(r) - lse);
  }
  result.grad(threshold_column) += std::exp(threshold - lse) - 1.0;
  return result;
}

RelationLossResult RelationLoss(const Matrix &candidates, std::span<const CandidatePair> pairs,
                                std::span<const RelationLabelSet> labels,
                                const RelationPrototypeBank &bank) {
  if (labels.size() != pairs.size()) throw ContractError("one label set per pair required");
  CheckDimensions(candidates, bank);
  const Eigen::Index d = candidates.cols();
  RelationLossResult result;
  result.grad_candidates = Matrix::Zero(candidates.rows(), d);
  result.grad_relations = Matrix::Zero(kNumRelationTypes, 2 * d);
  result.grad_nota = Matrix::Zero(bank.num_nota(), 2 * d);
  if (pairs.empty()) return result;

  const Matrix logits = ScorePairs(candidates, pairs, bank);
  const double inv_pairs = 1.0 / static_cast<double>(pairs.size());
  // Gradients w.r.t. logits, summed per head and per tail candidate.
  Matrix head_grad = Matrix::Zero(candidates.rows(), logits.cols());
  Matrix tail_grad = Matrix::Zero(candidates.rows(), logits.cols());
  for (size_t p = 0; p < pairs.size(); ++p) {
    const AtlResult atl = AdaptiveThresholdingLoss(logits.row(p), labels[p]);
    result.loss += atl.loss;
    head_grad.row(pairs[p].head) += atl.grad * inv_pairs;
    tail_grad.row(pairs[p].tail) += atl.grad * inv_pairs;
  }
  result.loss *= inv_pairs;

  const Matrix all = AllPrototypes(bank);
  result.grad_candidates = head_grad * all.leftCols(d) + tail_grad * all.rightCols(d);
  Matrix grad_all(all.rows(), 2 * d);
  grad_all.leftCols(d) = head_grad.transpose() * candidates;
  grad_all.rightCols(d) = tail_grad.transpose() * candidates;
  result.grad_relations = grad_all.topRows(kNumRelationTypes);
  result.grad_nota = grad_all.bottomRows(bank.num_nota());
  return result;
}

bool PredictionRanksBefore(const RelationPrediction &a, const RelationPrediction &b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.head, a.tail, a.type) < std::tie(b.head, b.tail, b.type);
}

std::vector<RelationPrediction> DeduplicatePredictions(std::vector<RelationPrediction> preds) {
  std::sort(preds.begin(), preds.end(), PredictionRanksBefore);
  std::vector<RelationPrediction> kept;
  for (auto &pred : preds) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const auto &k) {
      return k.type == pred.type && Overlaps(k.head, pred.head) && Overlaps(k.tail, pred.tail);
    });
    if (!suppressed) kept.push_back(std::move(pred));
  }
  return kept;
}

}  // namespace mathlink
