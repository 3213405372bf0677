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

#ifndef MATHLINK_ALIGN_H_
#define MATHLINK_ALIGN_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mathlink/corpus.h"
#include "mathlink/latex.h"
#include "mathlink/tokenizer.h"
#include "mathlink/types.h"

namespace mathlink {

// An entity annotation projected onto tokens. When a character boundary
// falls strictly inside a token the span is widened to the covering token
// and the corresponding mismatch flag is set.
struct AlignedEntity {
  std::string id;
  EntityType type = EntityType::kSymbol;
  CharSpan original;
  // False when preprocessing removed every character of the annotation or
  // only whitespace survived; `tokens` is then meaningless.
  bool aligned = false;
  TokenSpan tokens;
  bool start_mismatch = false;
  bool end_mismatch = false;

  bool mismatch() const { return !aligned || start_mismatch || end_mismatch; }
};

// Throws ValidationError when an annotation lies outside the original text.
std::vector<AlignedEntity> AlignAnnotations(const RawDocument &doc,
                                            const TokenizedDocument &tokens);

// Minimal token range covering [span.start, span.end) of the tokenized
// text, or nullopt when no token overlaps it.
std::optional<TokenSpan> CoveringTokens(const TokenizedDocument &tokens, CharSpan span);

struct GoldRelation {
  RelationType type = RelationType::kDirect;
  int head = 0;  // index into PreparedDocument::entities
  int tail = 0;
};

// A document ready for the model: tokenized, with annotations on tokens.
struct PreparedDocument {
  std::string id;
  Domain domain = Domain::kUnknown;
  TokenizedDocument tokens;
  std::vector<AlignedEntity> entities;
  std::vector<GoldRelation> relations;
  std::vector<std::string> warnings;
};

PreparedDocument PrepareDocument(const RawDocument &doc, const Tokenizer &tokenizer,
                                 Preprocess preprocess);

std::vector<PreparedDocument> PrepareCorpus(const std::vector<RawDocument> &docs,
                                            const Tokenizer &tokenizer,
                                            Preprocess preprocess);

// Relation instances whose endpoints cannot be represented exactly on the
// token grid.
struct MismatchReport {
  int relations = 0;
  int any_endpoint = 0;
  int both_endpoints = 0;

  // any_endpoint / relations. Throws UndefinedRateError on zero relations.
  double Rate() const;
  double BothRate() const;
};

MismatchReport BoundaryMismatchReport(std::span<const PreparedDocument> docs);

}  // namespace mathlink

#endif  // MATHLINK_ALIGN_H_
