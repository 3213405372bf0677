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

#include "mathlink/mention.h"

#include <algorithm>
#include <numeric>

#include "mathlink/errors.h"

namespace mathlink {

std::string_view PoolingName(Pooling pooling) {
  return pooling == Pooling::kMean ? "mean" : "max";
}

std::optional<Pooling> ParsePooling(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "max") return Pooling::kMax;
  return std::nullopt;
}

std::vector<TokenSpan> EnumerateSpans(int num_tokens, int max_length) {
  std::vector<TokenSpan> spans;
  if (num_tokens <= 0 || max_length <= 0) return spans;
  spans.reserve(static_cast<size_t>(CountSpans(num_tokens, max_length)));
  for (int start = 0; start < num_tokens; ++start) {
    const int last = std::min(num_tokens, start + max_length);
    for (int end = start + 1; end <= last; ++end) spans.push_back({start, end});
  }
  return spans;
}

int64_t CountSpans(int num_tokens, int max_length) {
  if (num_tokens <= 0 || max_length <= 0) return 0;
  const int64_t n = std::min(num_tokens, max_length);
  const int64_t length = num_tokens;
  // sum_{l=1..n} (L - l + 1)
  return n * (length + 1) - n * (n + 1) / 2;
}

Vector PoolSpan(const Matrix &tokens, TokenSpan span, Pooling pooling) {
  if (span.start < 0 || span.end > tokens.rows() || span.start >= span.end) {
    throw ContractError("span " + ToString(span) + " outside " +
                        std::to_string(tokens.rows()) + " tokens");
  }
  auto block = tokens.middleRows(span.start, span.length());
  if (pooling == Pooling::kMean) return block.colwise().mean().transpose();
  return block.colwise().maxCoeff().transpose();
}

PooledSpans PoolSpans(const Matrix &tokens, std::span<const TokenSpan> spans, Pooling pooling) {
  const int d = static_cast<int>(tokens.cols());
  PooledSpans out;
  out.embeddings.resize(static_cast<Eigen::Index>(spans.size()), d);
  if (pooling == Pooling::kMax) out.argmax.resize(spans.size() * d);
  for (size_t s = 0; s < spans.size(); ++s) {
    const TokenSpan span = spans[s];
    if (span.start < 0 || span.end > tokens.rows() || span.start >= span.end) {
      throw ContractError("span " + ToString(span) + " outside " +
                          std::to_string(tokens.rows()) + " tokens");
    }
    if (pooling == Pooling::kMean) {
      out.embeddings.row(s) = tokens.middleRows(span.start, span.length()).colwise().mean();
      continue;
    }
    for (int c = 0; c < d; ++c) {
      int best = span.start;
      for (int t = span.start + 1; t < span.end; ++t) {
        if (tokens(t, c) > tokens(best, c)) best = t;
      }
      out.embeddings(s, c) = tokens(best, c);
      out.argmax[s * d + c] = best;
    }
  }
  return out;
}

void PoolSpansBackward(const PooledSpans &pooled, std::span<const TokenSpan> spans,
                       Pooling pooling, const Matrix &grad_spans, Matrix *grad_tokens) {
  const int d = static_cast<int>(grad_spans.cols());
  for (size_t s = 0; s < spans.size(); ++s) {
    const TokenSpan span = spans[s];
    if (pooling == Pooling::kMean) {
      const RowVector share = grad_spans.row(s) / static_cast<double>(span.length());
      for (int t = span.start; t < span.end; ++t) grad_tokens->row(t) += share;
    } else {
      for (int c = 0; c < d; ++c) (*grad_tokens)(pooled.argmax[s * d + c], c) += grad_spans(s, c);
    }
  }
}

EntityPrototypeBank::EntityPrototypeBank(int hidden_size, std::mt19937_64 &rng) {
  prototypes_.Resize(kNumEntityTypes, hidden_size);
  InitNormal(prototypes_.value, 0.02, rng);
}

Vector ScoreSpans(const Matrix &span_embeddings, const Matrix &prototypes) {
  if (span_embeddings.cols() != prototypes.cols()) {
    throw ContractError("span dimension " + std::to_string(span_embeddings.cols()) +
                        " != prototype dimension " + std::to_string(prototypes.cols()));
  }
  if (prototypes.rows() == 0) throw ContractError("empty prototype bank");
  if (span_embeddings.rows() == 0) return Vector(0);
  return (span_embeddings * prototypes.transpose()).rowwise().maxCoeff();
}

bool RanksBefore(double score_a, TokenSpan a, double score_b, TokenSpan b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.start != b.start) return a.start < b.start;
  return a.length() < b.length();
}

std::vector<int> RankSpans(std::span<const double> scores, std::span<const TokenSpan> spans) {
  if (scores.size() != spans.size()) throw ContractError("scores and spans differ in size");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return RanksBefore(scores[a], spans[a], scores[b], spans[b]);
  });
  return order;
}

std::vector<int> SelectTopK(std::span<const double> scores, std::span<const TokenSpan> spans,
                            int k, std::span<const int> forced) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (scores.size() != spans.size()) throw ContractError("scores and spans differ in size");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t keep = std::min(order.size(), static_cast<size_t>(k));
  auto before = [&](int a, int b) {
    return RanksBefore(scores[a], spans[a], scores[b], spans[b]);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep), order.end(), before);
  order.resize(keep);
  std::vector<char> chosen(scores.size(), 0);
  for (int i : order) chosen[i] = 1;
  for (int i : forced) {
    if (i < 0 || i >= static_cast<int>(scores.size())) {
      throw ContractError("forced candidate index out of range");
    }
    if (!chosen[i]) {
      chosen[i] = 1;
      order.push_back(i);
    }
  }
  return order;
}

std::vector<int> DownsampleTrainingCandidates(int num_spans, std::span<const int> gold,
                                              int budget, std::mt19937_64 &rng) {
  std::vector<char> is_gold(num_spans, 0);
  int gold_count = 0;
  for (int g : gold) {
    if (g < 0 || g >= num_spans) throw ContractError("gold index out of range");
    if (!is_gold[g]) {
      is_gold[g] = 1;
      ++gold_count;
    }
  }
  if (budget < gold_count) {
    throw ConfigError("candidate budget " + std::to_string(budget) + " is smaller than the " +
                      std::to_string(gold_count) + " gold spans");
  }
  std::vector<int> out;
  if (num_spans <= budget) {
    out.resize(num_spans);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  std::vector<int> rest;
  rest.reserve(num_spans - gold_count);
  for (int i = 0; i < num_spans; ++i) {
    if (is_gold[i]) {
      out.push_back(i);
    } else {
      rest.push_back(i);
    }
  }
  // Partial Fisher-Yates.
  const int draw = budget - gold_count;
  for (int i = 0; i < draw; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(rest.size()) - 1);
    std::swap(rest[i], rest[pick(rng)]);
    out.push_back(rest[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MentionLossResult MentionLoss(const Matrix &candidates,
                              std::span<const std::optional<EntityType>> labels,
                              const Matrix &prototypes, double margin) {
  if (static_cast<Eigen::Index>(labels.size()) != candidates.rows()) {
    throw ContractError("one label slot per candidate required");
  }
  if (candidates.cols() != prototypes.cols()) {
    throw ContractError("candidate and prototype dimensions differ");
  }
  MentionLossResult result;
  result.grad_embeddings = Matrix::Zero(candidates.rows(), candidates.cols());
  result.grad_prototypes = Matrix::Zero(prototypes.rows(), prototypes.cols());

  std::vector<int> positives, negatives;
  for (size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? positives : negatives).push_back(static_cast<int>(i));
  }
  if (positives.empty() || negatives.empty()) return result;

  Matrix negative_rows(static_cast<Eigen::Index>(negatives.size()), candidates.cols());
  for (size_t j = 0; j < negatives.size(); ++j) negative_rows.row(j) = candidates.row(negatives[j]);

  result.pairs = static_cast<int64_t>(positives.size()) * static_cast<int64_t>(negatives.size());
  const double inv_pairs = 1.0 / static_cast<double>(result.pairs);
  Matrix grad_negative = Matrix::Zero(negative_rows.rows(), negative_rows.cols());

  for (int i : positives) {
    const int label = static_cast<int>(*labels[i]);
    const RowVector prototype = prototypes.row(label);
    const double positive = candidates.row(i).dot(prototype);
    const Vector negative = negative_rows * prototype.transpose();
    int active = 0;
    RowVector active_sum = RowVector::Zero(candidates.cols());
    for (Eigen::Index j = 0; j < negative.size(); ++j) {
      const double hinge = margin - positive + negative(j);
      if (hinge <= 0.0) continue;
      result.loss += hinge;
      ++active;
      active_sum += negative_rows.row(j);
      grad_negative.row(j) += prototype * inv_pairs;
    }
    if (active == 0) continue;
    result.grad_embeddings.row(i) -= prototype * (active * inv_pairs);
    result.grad_prototypes.row(label) +=
        (active_sum - active * candidates.row(i)) * inv_pairs;
  }
  for (size_t j = 0; j < negatives.size(); ++j) {
    result.grad_embeddings.row(negatives[j]) += grad_negative.row(j);
  }
  result.loss *= inv_pairs;
  return result;
}

}  // namespace mathlink
