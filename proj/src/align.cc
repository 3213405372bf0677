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

#include "mathlink/align.h"

#include <algorithm>

#include "mathlink/errors.h"
#include "mathlink/utf8.h"

namespace mathlink {

std::optional<TokenSpan> CoveringTokens(const TokenizedDocument &tokens, CharSpan span) {
  const auto &offsets = tokens.offsets;
  // First token ending after span.start, last token starting before span.end.
  auto first = std::partition_point(offsets.begin(), offsets.end(),
                                    [&](const CharSpan &t) { return t.end <= span.start; });
  auto last = std::partition_point(offsets.begin(), offsets.end(),
                                   [&](const CharSpan &t) { return t.start < span.end; });
  if (first >= last) return std::nullopt;
  return TokenSpan{static_cast<int>(first - offsets.begin()),
                   static_cast<int>(last - offsets.begin())};
}

std::vector<AlignedEntity> AlignAnnotations(const RawDocument &doc,
                                            const TokenizedDocument &tokens) {
  const int original_length = tokens.char_map.empty() ? 0 : tokens.char_map.back();
  std::vector<AlignedEntity> out;
  out.reserve(doc.entities.size());
  for (const auto &entity : doc.entities) {
    if (entity.span.start < 0 || entity.span.start >= entity.span.end ||
        entity.span.end > original_length) {
      throw ValidationError("document " + doc.id + ": entity \"" + entity.id +
                            "\" outside text bounds");
    }
    AlignedEntity aligned;
    aligned.id = entity.id;
    aligned.type = entity.type;
    aligned.original = entity.span;
    if (auto clean = ProjectToClean(tokens.char_map, entity.span)) {
      if (auto covering = CoveringTokens(tokens, *clean)) {
        aligned.aligned = true;
        aligned.tokens = *covering;
        aligned.start_mismatch = tokens.offsets[covering->start].start < clean->start;
        aligned.end_mismatch = tokens.offsets[covering->end - 1].end > clean->end;
      }
    }
    out.push_back(std::move(aligned));
  }
  return out;
}

PreparedDocument PrepareDocument(const RawDocument &doc, const Tokenizer &tokenizer,
                                 Preprocess preprocess) {
  PreparedDocument prepared;
  prepared.id = doc.id;
  prepared.domain = doc.domain;
  CleanText clean = PreprocessText(DecodeUtf8(doc.text), preprocess);
  prepared.warnings = clean.warnings;
  prepared.tokens = tokenizer.Tokenize(std::move(clean));
  prepared.entities = AlignAnnotations(doc, prepared.tokens);
  for (const auto &relation : doc.relations) {
    const int head = doc.FindEntity(relation.head);
    const int tail = doc.FindEntity(relation.tail);
    if (head < 0 || tail < 0) {
      throw ValidationError("document " + doc.id + ": relation references unknown entity \"" +
                            (head < 0 ? relation.head : relation.tail) + "\"");
    }
    prepared.relations.push_back({relation.type, head, tail});
  }
  return prepared;
}

std::vector<PreparedDocument> PrepareCorpus(const std::vector<RawDocument> &docs,
                                            const Tokenizer &tokenizer,
                                            Preprocess preprocess) {
  std::vector<PreparedDocument> out;
  out.reserve(docs.size());
  for (const auto &doc : docs) out.push_back(PrepareDocument(doc, tokenizer, preprocess));
  return out;
}

double MismatchReport::Rate() const {
  if (relations == 0) throw UndefinedRateError("mismatch rate over zero relation instances");
  return static_cast<double>(any_endpoint) / relations;
}

double MismatchReport::BothRate() const {
  if (relations == 0) throw UndefinedRateError("mismatch rate over zero relation instances");
  return static_cast<double>(both_endpoints) / relations;
}

MismatchReport BoundaryMismatchReport(std::span<const PreparedDocument> docs) {
  MismatchReport report;
  for (const auto &doc : docs) {
    for (const auto &relation : doc.relations) {
      const bool head = doc.entities[relation.head].mismatch();
      const bool tail = doc.entities[relation.tail].mismatch();
      ++report.relations;
      if (head || tail) ++report.any_endpoint;
      if (head && tail) ++report.both_endpoints;
    }
  }
  return report;
}

}  // namespace mathlink
