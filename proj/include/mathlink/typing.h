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

#ifndef MATHLINK_TYPING_H_
#define MATHLINK_TYPING_H_

#include <span>
#include <vector>

#include "mathlink/relation.h"
#include "mathlink/types.h"

namespace mathlink {

struct EndpointTypes {
  EntityType head;
  EntityType tail;
};

// Entity types implied by a relation. Direct heads start as PRIMARY and may
// be promoted to ORDERED afterwards.
constexpr EndpointTypes TypeMapFor(RelationType type) {
  switch (type) {
    case RelationType::kDirect: return {EntityType::kPrimary, EntityType::kSymbol};
    case RelationType::kCount: return {EntityType::kPrimary, EntityType::kSymbol};
    case RelationType::kCoreferSymbol: return {EntityType::kSymbol, EntityType::kSymbol};
    case RelationType::kCoreferDescription: return {EntityType::kPrimary, EntityType::kPrimary};
  }
  return {EntityType::kPrimary, EntityType::kSymbol};
}

struct TypedMention {
  TokenSpan span;
  EntityType type = EntityType::kSymbol;

  auto operator<=>(const TypedMention &) const = default;
};

struct TypingResult {
  std::vector<TypedMention> mentions;  // sorted by span
  // Spans that were given both SYMBOL and PRIMARY; resolved to SYMBOL.
  int conflicts = 0;
};

// Types every span that takes part in a prediction. A PRIMARY span heading
// two or more Direct predictions becomes ORDERED.
TypingResult AssignEntityTypes(std::span<const RelationPrediction> preds);

}  // namespace mathlink

#endif  // MATHLINK_TYPING_H_
