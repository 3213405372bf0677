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

#include "mathlink/eval.h"

#include <algorithm>
#include <set>

#include "mathlink/errors.h"
#include "mathlink/mention.h"

namespace mathlink {
namespace {

Prf StrictPrf(const NerCounts &c) {
  Prf out;
  if (c.actual() > 0) out.precision = static_cast<double>(c.correct) / c.actual();
  if (c.possible() > 0) out.recall = static_cast<double>(c.correct) / c.possible();
  out.f1 = F1Score(out.precision, out.recall);
  return out;
}

Prf LenientPrf(const NerCounts &c) {
  const double credit = c.correct + 0.5 * c.partial;
  Prf out;
  if (c.actual() > 0) out.precision = credit / c.actual();
  if (c.possible() > 0) out.recall = credit / c.possible();
  out.f1 = F1Score(out.precision, out.recall);
  return out;
}

Prf CountsPrf(const RelationCounts &c) {
  Prf out;
  if (c.predicted > 0) out.precision = static_cast<double>(c.true_positives) / c.predicted;
  if (c.gold > 0) out.recall = static_cast<double>(c.true_positives) / c.gold;
  out.f1 = F1Score(out.precision, out.recall);
  return out;
}

ReBreakdown Summarize(const std::map<RelationType, RelationCounts> &counts) {
  ReBreakdown out;
  out.counts = counts;
  int present = 0;
  for (const auto &[type, c] : counts) {
    out.total.true_positives += c.true_positives;
    out.total.predicted += c.predicted;
    out.total.gold += c.gold;
    const Prf prf = CountsPrf(c);
    out.per_type[type] = prf;
    if (c.gold > 0) {
      ++present;
      out.macro.precision += prf.precision;
      out.macro.recall += prf.recall;
      out.macro.f1 += prf.f1;
    }
  }
  if (present > 0) {
    out.macro.precision /= present;
    out.macro.recall /= present;
    out.macro.f1 /= present;
  }
  out.micro = CountsPrf(out.total);
  return out;
}

}  // namespace

double F1Score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double SpanIou(TokenSpan a, TokenSpan b) {
  const int intersection = std::max(0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const int union_size = a.length() + b.length() - intersection;
  if (union_size <= 0) return 0.0;
  return static_cast<double>(intersection) / union_size;
}

void NerTally::Add(std::span<const TypedMention> predicted, std::span<const TypedMention> gold) {
  auto &strict = counts_[static_cast<int>(NerMode::kStrict)];
  auto &exact = counts_[static_cast<int>(NerMode::kExact)];
  auto &partial = counts_[static_cast<int>(NerMode::kPartial)];
  auto &type = counts_[static_cast<int>(NerMode::kType)];
  std::vector<char> touched(gold.size(), 0);

  for (const auto &pred : predicted) {
    auto same = std::find(gold.begin(), gold.end(), pred);
    if (same != gold.end()) {
      touched[same - gold.begin()] = 1;
      ++strict.correct;
      ++exact.correct;
      ++partial.correct;
      ++type.correct;
      continue;
    }
    bool found = false;
    for (size_t g = 0; g < gold.size(); ++g) {
      const auto &truth = gold[g];
      if (truth.span == pred.span) {
        // Boundaries right, type wrong.
        ++strict.incorrect;
        ++exact.correct;
        ++partial.correct;
        ++type.incorrect;
      } else if (Overlaps(truth.span, pred.span)) {
        ++strict.incorrect;
        ++exact.incorrect;
        ++partial.partial;
        if (truth.type == pred.type) {
          ++type.correct;
        } else {
          ++type.incorrect;
        }
      } else {
        continue;
      }
      touched[g] = 1;
      found = true;
      break;
    }
    if (!found) {
      for (auto &c : counts_) ++c.spurious;
    }
  }
  for (char t : touched) {
    if (!t) {
      for (auto &c : counts_) ++c.missed;
    }
  }
}

NerScores NerTally::Scores() const {
  NerScores out;
  out.strict = StrictPrf(counts(NerMode::kStrict));
  out.exact = StrictPrf(counts(NerMode::kExact));
  out.partial = LenientPrf(counts(NerMode::kPartial));
  out.type = LenientPrf(counts(NerMode::kType));
  return out;
}

NerScores NerEvaluate(std::span<const TypedMention> predicted, std::span<const TypedMention> gold) {
  NerTally tally;
  tally.Add(predicted, gold);
  return tally.Scores();
}

std::map<RelationType, RelationCounts> MatchRelations(const DocumentRelations &doc,
                                                      const MatchSpec &match) {
  double threshold = 0.0;
  if (match.mode == MatchSpec::Mode::kIou) {
    if (!match.iou_threshold) throw ConfigError("IOU matching requires a threshold");
    threshold = *match.iou_threshold;
    if (!(threshold > 0.0 && threshold <= 1.0)) {
      throw ConfigError("IOU threshold must lie in (0, 1]");
    }
  }

  std::map<RelationType, RelationCounts> counts;
  for (const auto &g : doc.gold) ++counts[g.type].gold;
  for (const auto &p : doc.predicted) ++counts[p.type].predicted;

  std::vector<int> order(doc.predicted.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return PredictionRanksBefore(doc.predicted[a], doc.predicted[b]);
  });

  std::vector<char> claimed(doc.gold.size(), 0);
  std::vector<char> matched(doc.predicted.size(), 0);
  for (int p : order) {
    const auto &pred = doc.predicted[p];
    for (size_t g = 0; g < doc.gold.size(); ++g) {
      const auto &gold = doc.gold[g];
      if (!claimed[g] && gold.type == pred.type && gold.head == pred.head &&
          gold.tail == pred.tail) {
        claimed[g] = 1;
        matched[p] = 1;
        ++counts[pred.type].true_positives;
        break;
      }
    }
  }
  if (match.mode == MatchSpec::Mode::kIou) {
    for (int p : order) {
      if (matched[p]) continue;
      const auto &pred = doc.predicted[p];
      int best = -1;
      double best_overlap = -1.0;
      for (size_t g = 0; g < doc.gold.size(); ++g) {
        const auto &gold = doc.gold[g];
        if (claimed[g] || gold.type != pred.type) continue;
        const double head = SpanIou(gold.head, pred.head);
        const double tail = SpanIou(gold.tail, pred.tail);
        if (head > threshold && tail > threshold && head + tail > best_overlap) {
          best = static_cast<int>(g);
          best_overlap = head + tail;
        }
      }
      if (best >= 0) {
        claimed[best] = 1;
        matched[p] = 1;
        ++counts[pred.type].true_positives;
      }
    }
  }
  return counts;
}

ReScores ReEvaluate(std::span<const DocumentRelations> docs, const MatchSpec &match) {
  std::map<RelationType, RelationCounts> overall;
  std::map<Domain, std::map<RelationType, RelationCounts>> per_domain;
  for (const auto &doc : docs) {
    auto &domain = per_domain[doc.domain];
    for (const auto &[type, c] : MatchRelations(doc, match)) {
      for (auto *target : {&overall[type], &domain[type]}) {
        target->true_positives += c.true_positives;
        target->predicted += c.predicted;
        target->gold += c.gold;
      }
    }
  }
  ReScores scores;
  scores.overall = Summarize(overall);
  for (const auto &[domain, counts] : per_domain) scores.per_domain[domain] = Summarize(counts);
  return scores;
}

RecallCounts EntityRecallCounts(std::span<const double> scores,
                                std::span<const TokenSpan> spans,
                                std::span<const TokenSpan> gold, int k) {
  const std::set<TokenSpan> targets(gold.begin(), gold.end());
  RecallCounts out;
  out.total = static_cast<int64_t>(targets.size());
  if (targets.empty() || spans.empty()) return out;
  const std::vector<int> top = SelectTopK(scores, spans, std::max(k, 1));
  std::set<TokenSpan> seen;
  for (int i : top) {
    if (targets.count(spans[i]) && seen.insert(spans[i]).second) ++out.found;
  }
  return out;
}

double EntityRecallAtK(std::span<const double> scores, std::span<const TokenSpan> spans,
                       std::span<const TokenSpan> gold, int k) {
  const RecallCounts counts = EntityRecallCounts(scores, spans, gold, k);
  if (counts.total == 0) throw UndefinedRateError("entity recall over zero gold spans");
  return static_cast<double>(counts.found) / counts.total;
}

nlohmann::json ToJson(const Prf &prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

nlohmann::json ToJson(const NerScores &scores) {
  return {{"strict", ToJson(scores.strict)},
          {"exact", ToJson(scores.exact)},
          {"partial", ToJson(scores.partial)},
          {"type", ToJson(scores.type)}};
}

nlohmann::json ToJson(const ReBreakdown &scores) {
  nlohmann::json per_type = nlohmann::json::object();
  for (const auto &[type, prf] : scores.per_type) {
    per_type[std::string(RelationTypeName(type))] = ToJson(prf);
  }
  return {{"micro", ToJson(scores.micro)},
          {"macro", ToJson(scores.macro)},
          {"per_type", per_type},
          {"true_positives", scores.total.true_positives},
          {"predicted", scores.total.predicted},
          {"gold", scores.total.gold}};
}

nlohmann::json ToJson(const ReScores &scores) {
  nlohmann::json domains = nlohmann::json::object();
  for (const auto &[domain, breakdown] : scores.per_domain) {
    domains[std::string(DomainName(domain))] = ToJson(breakdown);
  }
  nlohmann::json out = ToJson(scores.overall);
  out["per_domain"] = domains;
  return out;
}

}  // namespace mathlink
