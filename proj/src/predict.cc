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

#include "mathlink/predict.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mathlink/errors.h"
#include "mathlink/utf8.h"

namespace mathlink {
namespace {

using json = nlohmann::json;

constexpr TokenSpan kUnalignedSpan{-1, -1};

// Relations and mentions of one document in token space.
struct TokenPrediction {
  std::vector<RelationPrediction> relations;
  std::vector<TypedMention> mentions;
};

CharSpan CleanCharsOf(const TokenizedDocument &tokens, TokenSpan span) {
  return {tokens.offsets[span.start].start, tokens.offsets[span.end - 1].end};
}

// Maps character-level predictions onto the tokens of `tokens`.
TokenPrediction ToTokenSpace(const DocumentPrediction &pred, const TokenizedDocument &tokens,
                             int text_length) {
  std::vector<std::optional<TokenSpan>> spans;
  TokenPrediction out;
  for (const auto &mention : pred.mentions) {
    if (mention.span.start < 0 || mention.span.start >= mention.span.end ||
        mention.span.end > text_length) {
      throw ValidationError("prediction for document " + pred.id + ": mention \"" + mention.id +
                            "\" outside text bounds");
    }
    spans.push_back(CoveringTokens(tokens, mention.span));
  }
  for (const auto &relation : pred.relations) {
    if (relation.head < 0 || relation.tail < 0 ||
        relation.head >= static_cast<int>(spans.size()) ||
        relation.tail >= static_cast<int>(spans.size())) {
      throw ValidationError("prediction for document " + pred.id +
                            ": relation endpoint out of range");
    }
    // Only mentions that take part in a relation are scored.
    for (int index : {relation.head, relation.tail}) {
      if (spans[index]) out.mentions.push_back({*spans[index], pred.mentions[index].type});
    }
    if (!spans[relation.head] || !spans[relation.tail]) continue;
    out.relations.push_back(
        {*spans[relation.head], *spans[relation.tail], relation.type, relation.score});
  }
  std::sort(out.mentions.begin(), out.mentions.end());
  out.mentions.erase(std::unique(out.mentions.begin(), out.mentions.end()), out.mentions.end());
  return out;
}

Prf ToPercent(const Prf &prf) {
  return {100.0 * prf.precision, 100.0 * prf.recall, 100.0 * prf.f1};
}

}  // namespace

DocumentPrediction PredictDocument(const Model &model, std::string_view text, int k,
                                   std::string id, Domain domain) {
  if (k < 1) throw ConfigError("k must be >= 1");
  DocumentPrediction out;
  out.id = std::move(id);
  out.domain = domain;
  out.text = std::string(text);
  const std::u32string original = DecodeUtf8(text);
  const TokenizedDocument tokens = model.TokenizeText(original);
  if (tokens.size() == 0) return out;
  const DecodedDocument decoded = Decode(model, AnalyzeSpans(model, tokens), k);

  std::map<TokenSpan, int> index;
  for (const auto &mention : decoded.typing.mentions) {
    index[mention.span] = static_cast<int>(out.mentions.size());
    PredictedMention predicted;
    predicted.id = "T" + std::to_string(out.mentions.size() + 1);
    predicted.type = mention.type;
    predicted.span = ProjectToOriginal(tokens.char_map, CleanCharsOf(tokens, mention.span));
    out.mentions.push_back(std::move(predicted));
  }
  for (const auto &relation : decoded.relations) {
    out.relations.push_back(
        {relation.type, index.at(relation.head), index.at(relation.tail), relation.score});
  }
  out.type_conflicts = decoded.typing.conflicts;
  return out;
}

DocumentPrediction PredictDocument(const Model &model, const RawDocument &doc, int k) {
  return PredictDocument(model, doc.text, k, doc.id, doc.domain);
}

json ToJson(const DocumentPrediction &prediction) {
  json entities = json::array();
  for (const auto &m : prediction.mentions) {
    entities.push_back({{"id", m.id},
                        {"type", EntityTypeName(m.type)},
                        {"start", m.span.start},
                        {"end", m.span.end}});
  }
  json relations = json::array();
  for (const auto &r : prediction.relations) {
    relations.push_back({{"type", RelationTypeName(r.type)},
                         {"head", prediction.mentions[r.head].id},
                         {"tail", prediction.mentions[r.tail].id},
                         {"score", r.score}});
  }
  return {{"id", prediction.id},
          {"domain", DomainName(prediction.domain)},
          {"text", prediction.text},
          {"entities", entities},
          {"relations", relations},
          {"type_conflicts", prediction.type_conflicts}};
}

DocumentPrediction PredictionFromJson(const json &j) {
  DocumentPrediction out;
  try {
    out.id = j.at("id").get<std::string>();
    out.domain = ParseDomain(j.value("domain", ""));
    out.text = j.value("text", "");
    std::map<std::string, int> index;
    for (const auto &e : j.at("entities")) {
      PredictedMention m;
      m.id = e.at("id").get<std::string>();
      auto type = ParseEntityType(e.at("type").get<std::string>());
      if (!type) throw FormatError("document " + out.id + ": unknown entity type");
      m.type = *type;
      m.span = {e.at("start").get<int>(), e.at("end").get<int>()};
      if (!index.emplace(m.id, static_cast<int>(out.mentions.size())).second) {
        throw FormatError("document " + out.id + ": duplicate entity id " + m.id);
      }
      out.mentions.push_back(std::move(m));
    }
    for (const auto &r : j.at("relations")) {
      PredictedRelation rel;
      auto type = ParseRelationType(r.at("type").get<std::string>());
      if (!type) throw FormatError("document " + out.id + ": unknown relation type");
      rel.type = *type;
      const auto head = index.find(r.at("head").get<std::string>());
      const auto tail = index.find(r.at("tail").get<std::string>());
      if (head == index.end() || tail == index.end()) {
        throw FormatError("document " + out.id + ": relation references unknown entity");
      }
      rel.head = head->second;
      rel.tail = tail->second;
      rel.score = r.value("score", 0.0);
      out.relations.push_back(rel);
    }
    out.type_conflicts = j.value("type_conflicts", 0);
  } catch (const json::exception &e) {
    throw FormatError(std::string("malformed prediction record: ") + e.what());
  }
  return out;
}

void SavePredictions(std::span<const DocumentPrediction> predictions,
                     const std::filesystem::path &path) {
  json out = json::array();
  for (const auto &p : predictions) out.push_back(ToJson(p));
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw FormatError("cannot write " + path.string());
  file << out.dump(2) << "\n";
}

std::vector<DocumentPrediction> LoadPredictions(const std::filesystem::path &path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(file);
  } catch (const json::parse_error &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw FormatError(path.string() + ": expected a JSON array");
  std::vector<DocumentPrediction> out;
  for (const auto &record : j) out.push_back(PredictionFromJson(record));
  return out;
}

std::vector<RelationInstance> GoldRelationInstances(const PreparedDocument &doc) {
  std::vector<RelationInstance> out;
  for (const auto &relation : doc.relations) {
    const auto &head = doc.entities[relation.head];
    const auto &tail = doc.entities[relation.tail];
    out.push_back({head.aligned ? head.tokens : kUnalignedSpan,
                   tail.aligned ? tail.tokens : kUnalignedSpan, relation.type});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<TypedMention> GoldMentions(const PreparedDocument &doc) {
  std::set<TypedMention> mentions;
  for (const auto &relation : doc.relations) {
    for (int index : {relation.head, relation.tail}) {
      const auto &entity = doc.entities[index];
      if (entity.aligned) mentions.insert({entity.tokens, entity.type});
    }
  }
  return {mentions.begin(), mentions.end()};
}

std::vector<TokenSpan> GoldSpans(const PreparedDocument &doc) {
  std::set<TokenSpan> spans;
  for (const auto &entity : doc.entities) {
    if (entity.aligned) spans.insert(entity.tokens);
  }
  return {spans.begin(), spans.end()};
}

json EvaluationReport::ToJson() const {
  json out = {{"relations_strict", mathlink::ToJson(strict)},
              {"relations_iou", mathlink::ToJson(iou)},
              {"iou_threshold", iou_threshold},
              {"entities", mathlink::ToJson(ner)}};
  if (entity_recall.total > 0) {
    out["entity_recall"] = static_cast<double>(entity_recall.found) / entity_recall.total;
  }
  return out;
}

EvaluationReport EvaluateModel(const Model &model, std::span<const PreparedDocument> docs, int k,
                               double iou_threshold) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<DocumentRelations> relations;
  NerTally tally;
  EvaluationReport report;
  report.iou_threshold = iou_threshold;
  for (const auto &doc : docs) {
    DocumentRelations dr;
    dr.domain = doc.domain;
    dr.gold = GoldRelationInstances(doc);
    const std::vector<TypedMention> gold_mentions = GoldMentions(doc);
    if (doc.tokens.size() > 0) {
      const SpanAnalysis analysis = AnalyzeSpans(model, doc.tokens);
      const DecodedDocument decoded = Decode(model, analysis, k);
      dr.predicted = decoded.relations;
      tally.Add(decoded.typing.mentions, gold_mentions);
      const std::vector<TokenSpan> gold = GoldSpans(doc);
      const RecallCounts recall = EntityRecallCounts(
          std::span<const double>(analysis.scores.data(),
                                  static_cast<size_t>(analysis.scores.size())),
          analysis.spans, gold, k);
      report.entity_recall.found += recall.found;
      report.entity_recall.total += static_cast<int64_t>(gold.size());
    } else {
      tally.Add({}, gold_mentions);
    }
    relations.push_back(std::move(dr));
  }
  report.strict = ReEvaluate(relations, MatchSpec::Strict());
  report.iou = ReEvaluate(relations, MatchSpec::Iou(iou_threshold));
  report.ner = tally.Scores();
  return report;
}

EvaluationReport EvaluatePredictions(std::span<const DocumentPrediction> predictions,
                                     std::span<const RawDocument> gold, double iou_threshold) {
  std::map<std::string, const DocumentPrediction *> by_id;
  for (const auto &p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw ValidationError("duplicate prediction for document " + p.id);
    }
  }
  std::set<std::string> gold_ids;
  for (const auto &g : gold) gold_ids.insert(g.id);
  for (const auto &[id, p] : by_id) {
    if (!gold_ids.count(id)) throw ValidationError("prediction for unknown document " + id);
  }

  const Tokenizer plain;
  std::vector<DocumentRelations> relations;
  NerTally tally;
  for (const auto &doc : gold) {
    const PreparedDocument prepared = PrepareDocument(doc, plain, Preprocess::kNone);
    DocumentRelations dr;
    dr.domain = doc.domain;
    dr.gold = GoldRelationInstances(prepared);
    TokenPrediction tp;
    if (auto it = by_id.find(doc.id); it != by_id.end()) {
      const DocumentPrediction &pred = *it->second;
      if (!pred.text.empty() && pred.text != doc.text) {
        throw ValidationError("prediction for document " + doc.id +
                              " was made on a different text");
      }
      tp = ToTokenSpace(pred, prepared.tokens, CodePointLength(doc.text));
    }
    dr.predicted = std::move(tp.relations);
    tally.Add(tp.mentions, GoldMentions(prepared));
    relations.push_back(std::move(dr));
  }
  EvaluationReport report;
  report.iou_threshold = iou_threshold;
  report.strict = ReEvaluate(relations, MatchSpec::Strict());
  report.iou = ReEvaluate(relations, MatchSpec::Iou(iou_threshold));
  report.ner = tally.Scores();
  return report;
}

std::vector<SweepRow> KSweep(const Model &model, std::span<const PreparedDocument> docs,
                             std::span<const int> ks) {
  for (int k : ks) {
    if (k < 1) throw ConfigError("k must be >= 1");
  }
  std::vector<std::vector<DocumentRelations>> relations(ks.size());
  std::vector<RecallCounts> recall(ks.size());
  for (const auto &doc : docs) {
    const std::vector<RelationInstance> gold = GoldRelationInstances(doc);
    const std::vector<TokenSpan> gold_spans = GoldSpans(doc);
    std::optional<SpanAnalysis> analysis;
    if (doc.tokens.size() > 0) analysis = AnalyzeSpans(model, doc.tokens);
    for (size_t i = 0; i < ks.size(); ++i) {
      DocumentRelations dr;
      dr.domain = doc.domain;
      dr.gold = gold;
      recall[i].total += static_cast<int64_t>(gold_spans.size());
      if (analysis) {
        dr.predicted = Decode(model, *analysis, ks[i]).relations;
        recall[i].found +=
            EntityRecallCounts(std::span<const double>(analysis->scores.data(),
                                                       static_cast<size_t>(analysis->scores.size())),
                               analysis->spans, gold_spans, ks[i])
                .found;
      }
      relations[i].push_back(std::move(dr));
    }
  }
  std::vector<SweepRow> rows;
  for (size_t i = 0; i < ks.size(); ++i) {
    SweepRow row;
    row.k = ks[i];
    row.relation = ReEvaluate(relations[i], MatchSpec::Strict()).overall.micro;
    if (recall[i].total > 0) {
      row.entity_recall = static_cast<double>(recall[i].found) / recall[i].total;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<int> SweepRange(int k_min, int k_max, int k_step) {
  if (k_min < 1 || k_max < k_min || k_step < 1) {
    throw ConfigError("sweep needs 1 <= k-min <= k-max and k-step >= 1");
  }
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; k += k_step) ks.push_back(k);
  return ks;
}

std::string SweepCsv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "k,p,r,f,entity_recall\n";
  char line[160];
  for (const auto &row : rows) {
    const Prf pct = ToPercent(row.relation);
    std::snprintf(line, sizeof(line), "%d,%.4f,%.4f,%.4f,%.4f\n", row.k, pct.precision,
                  pct.recall, pct.f1, 100.0 * row.entity_recall);
    out << line;
  }
  return out.str();
}

}  // namespace mathlink
