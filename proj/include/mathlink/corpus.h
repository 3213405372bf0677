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

#ifndef MATHLINK_CORPUS_H_
#define MATHLINK_CORPUS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mathlink/types.h"

namespace mathlink {

struct EntityAnnotation {
  std::string id;
  EntityType type = EntityType::kSymbol;
  CharSpan span;

  bool operator==(const EntityAnnotation &) const = default;
};

struct RelationAnnotation {
  RelationType type = RelationType::kDirect;
  std::string head;  // entity id
  std::string tail;  // entity id

  bool operator==(const RelationAnnotation &) const = default;
};

// A document with character-level annotations. Offsets count code points
// of the original (unprocessed) text.
struct RawDocument {
  std::string id;
  Domain domain = Domain::kUnknown;
  std::string text;  // UTF-8
  std::vector<EntityAnnotation> entities;
  std::vector<RelationAnnotation> relations;

  // Index into entities, or -1.
  int FindEntity(std::string_view entity_id) const;

  bool operator==(const RawDocument &) const = default;
};

// Checks every RawDocument invariant; throws ValidationError naming the
// offending id.
void ValidateDocument(const RawDocument &doc);

// Parses a corpus from either a JSON array of documents or JSON Lines (one
// document per line). `source` only labels error messages.
std::vector<RawDocument> ParseCorpus(std::string_view content,
                                     std::string_view source = "<memory>");

std::vector<RawDocument> LoadCorpus(const std::filesystem::path &path);

// Serializes as JSON Lines.
std::string SerializeCorpus(const std::vector<RawDocument> &docs);
void SaveCorpus(const std::vector<RawDocument> &docs, const std::filesystem::path &path);

// Reads a brat standoff pair (`<stem>.txt` + `<stem>.ann`), the format the
// shared-task data ships in. T-lines become entities, R-lines relations with
// Arg1 as head. Discontinuous spans are collapsed to their outer bounds.
RawDocument LoadBratDocument(const std::filesystem::path &txt_path,
                             const std::filesystem::path &ann_path, Domain domain);

// Converts every `*.txt`/`*.ann` pair under `dir`, sorted by stem.
std::vector<RawDocument> LoadBratDirectory(const std::filesystem::path &dir,
                                           Domain domain);

}  // namespace mathlink

#endif  // MATHLINK_CORPUS_H_
