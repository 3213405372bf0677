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

#include "mathlink/typing.h"

#include <map>
#include <set>

namespace mathlink {

TypingResult AssignEntityTypes(std::span<const RelationPrediction> preds) {
  struct Votes {
    bool symbol = false;
    bool primary = false;
    std::set<TokenSpan> direct_tails;
  };
  std::map<TokenSpan, Votes> spans;
  auto vote = [&](TokenSpan span, EntityType type) {
    Votes &v = spans[span];
    (type == EntityType::kSymbol ? v.symbol : v.primary) = true;
  };
  for (const auto &pred : preds) {
    const EndpointTypes types = TypeMapFor(pred.type);
    vote(pred.head, types.head);
    vote(pred.tail, types.tail);
    if (pred.type == RelationType::kDirect) spans[pred.head].direct_tails.insert(pred.tail);
  }

  TypingResult result;
  for (const auto &[span, votes] : spans) {
    EntityType type;
    if (votes.symbol) {
      type = EntityType::kSymbol;
      if (votes.primary) ++result.conflicts;
    } else {
      type = votes.direct_tails.size() >= 2 ? EntityType::kOrdered : EntityType::kPrimary;
    }
    result.mentions.push_back({span, type});
  }
  return result;
}

}  // namespace mathlink
