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

// Tests for relation-driven entity typing.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mathlink/typing.h"
#include "test_util.h"

namespace mathlink {
namespace {

using testing::RandomInt;

constexpr TokenSpan kHead{0, 2};
constexpr TokenSpan kTail{4, 5};
constexpr TokenSpan kOther{7, 8};

RelationPrediction Pred(TokenSpan head, TokenSpan tail, RelationType type, double score = 1.0) {
  return {head, tail, type, score};
}

EntityType TypeOf(const TypingResult &result, TokenSpan span) {
  for (const TypedMention &m : result.mentions) {
    if (m.span == span) return m.type;
  }
  FAIL("span not typed");
  return EntityType::kSymbol;
}

TEST_CASE("each relation type maps its endpoints", "[typing]") {
  struct Row {
    RelationType relation;
    EntityType head;
    EntityType tail;
  };
  const std::vector<Row> table = {
      {RelationType::kDirect, EntityType::kPrimary, EntityType::kSymbol},
      {RelationType::kCount, EntityType::kPrimary, EntityType::kSymbol},
      {RelationType::kCoreferSymbol, EntityType::kSymbol, EntityType::kSymbol},
      {RelationType::kCoreferDescription, EntityType::kPrimary, EntityType::kPrimary},
  };
  for (const Row &row : table) {
    INFO(RelationTypeName(row.relation));
    CHECK(TypeMapFor(row.relation).head == row.head);
    CHECK(TypeMapFor(row.relation).tail == row.tail);
    const std::vector<RelationPrediction> preds = {Pred(kHead, kTail, row.relation)};
    const TypingResult result = AssignEntityTypes(preds);
    REQUIRE(result.mentions.size() == 2);
    CHECK(TypeOf(result, kHead) == row.head);
    CHECK(TypeOf(result, kTail) == row.tail);
    CHECK(result.conflicts == 0);
  }
}

TEST_CASE("a head of several Direct links becomes ORDERED", "[typing]") {
  const std::vector<RelationPrediction> preds = {Pred(kHead, kTail, RelationType::kDirect),
                                                 Pred(kHead, kOther, RelationType::kDirect)};
  const TypingResult result = AssignEntityTypes(preds);
  CHECK(TypeOf(result, kHead) == EntityType::kOrdered);
  CHECK(TypeOf(result, kTail) == EntityType::kSymbol);
  CHECK(TypeOf(result, kOther) == EntityType::kSymbol);
}

TEST_CASE("ORDERED needs two Direct links from the same head", "[typing]") {
  SECTION("Direct plus Count stays PRIMARY") {
    const std::vector<RelationPrediction> preds = {Pred(kHead, kTail, RelationType::kDirect),
                                                   Pred(kHead, kOther, RelationType::kCount)};
    CHECK(TypeOf(AssignEntityTypes(preds), kHead) == EntityType::kPrimary);
  }
  SECTION("a repeated identical prediction counts once") {
    const std::vector<RelationPrediction> preds = {Pred(kHead, kTail, RelationType::kDirect),
                                                   Pred(kHead, kTail, RelationType::kDirect)};
    CHECK(TypeOf(AssignEntityTypes(preds), kHead) == EntityType::kPrimary);
  }
  SECTION("two Direct links into the same tail do not promote the tail") {
    const std::vector<RelationPrediction> preds = {Pred(kHead, kTail, RelationType::kDirect),
                                                   Pred(kOther, kTail, RelationType::kDirect)};
    const TypingResult result = AssignEntityTypes(preds);
    CHECK(TypeOf(result, kTail) == EntityType::kSymbol);
    CHECK(TypeOf(result, kHead) == EntityType::kPrimary);
    CHECK(TypeOf(result, kOther) == EntityType::kPrimary);
  }
}

TEST_CASE("SYMBOL wins type conflicts and conflicts are counted", "[typing]") {
  // kTail is a SYMBOL as a Direct tail and a PRIMARY as a Count head.
  const std::vector<RelationPrediction> preds = {Pred(kHead, kTail, RelationType::kDirect),
                                                 Pred(kTail, kOther, RelationType::kCount)};
  const TypingResult result = AssignEntityTypes(preds);
  CHECK(TypeOf(result, kTail) == EntityType::kSymbol);
  CHECK(result.conflicts == 1);

  // Order of predictions does not matter.
  const std::vector<RelationPrediction> reversed = {preds[1], preds[0]};
  const TypingResult again = AssignEntityTypes(reversed);
  CHECK(again.mentions == result.mentions);
  CHECK(again.conflicts == 1);

  // A symbol heading two Direct links is still a SYMBOL.
  const std::vector<RelationPrediction> symbol_head = {
      Pred(kHead, kTail, RelationType::kDirect), Pred(kHead, kOther, RelationType::kDirect),
      Pred(kHead, {10, 11}, RelationType::kCoreferSymbol)};
  CHECK(TypeOf(AssignEntityTypes(symbol_head), kHead) == EntityType::kSymbol);
}

TEST_CASE("no predictions means no mentions", "[typing]") {
  const TypingResult result = AssignEntityTypes(std::vector<RelationPrediction>());
  CHECK(result.mentions.empty());
  CHECK(result.conflicts == 0);
}

TEST_CASE("typing invariants on random predictions", "[typing][property]") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TokenSpan> pool;
    for (int s = RandomInt(rng, 2, 8); s > 0; --s) {
      const int start = RandomInt(rng, 0, 20);
      pool.push_back({start, start + RandomInt(rng, 1, 3)});
    }
    std::vector<RelationPrediction> preds;
    for (int p = RandomInt(rng, 0, 12); p > 0; --p) {
      const TokenSpan head = pool[RandomInt(rng, 0, static_cast<int>(pool.size()) - 1)];
      const TokenSpan tail = pool[RandomInt(rng, 0, static_cast<int>(pool.size()) - 1)];
      if (head == tail) continue;
      preds.push_back(Pred(head, tail, kAllRelationTypes[RandomInt(rng, 0, 3)]));
    }
    const TypingResult result = AssignEntityTypes(preds);

    // Exactly the participating spans, each once, sorted.
    std::set<TokenSpan> participating;
    for (const auto &p : preds) {
      participating.insert(p.head);
      participating.insert(p.tail);
    }
    std::vector<TokenSpan> typed;
    for (const auto &m : result.mentions) typed.push_back(m.span);
    REQUIRE(typed == std::vector<TokenSpan>(participating.begin(), participating.end()));

    // Independent re-derivation of every type and the conflict count.
    int conflicts = 0;
    for (const TypedMention &m : result.mentions) {
      bool symbol = false, primary = false;
      std::set<TokenSpan> direct_tails;
      for (const auto &p : preds) {
        if (p.head == m.span) {
          (TypeMapFor(p.type).head == EntityType::kSymbol ? symbol : primary) = true;
          if (p.type == RelationType::kDirect) direct_tails.insert(p.tail);
        }
        if (p.tail == m.span) {
          (TypeMapFor(p.type).tail == EntityType::kSymbol ? symbol : primary) = true;
        }
      }
      conflicts += symbol && primary;
      const EntityType expected = symbol                    ? EntityType::kSymbol
                                  : direct_tails.size() >= 2 ? EntityType::kOrdered
                                                             : EntityType::kPrimary;
      REQUIRE(m.type == expected);
      if (m.type == EntityType::kOrdered) REQUIRE(direct_tails.size() >= 2);
    }
    REQUIRE(result.conflicts == conflicts);

    // Deterministic and independent of input order.
    std::shuffle(preds.begin(), preds.end(), rng);
    const TypingResult shuffled = AssignEntityTypes(preds);
    REQUIRE(shuffled.mentions == result.mentions);
    REQUIRE(shuffled.conflicts == result.conflicts);
  }
}

}  // namespace
}  // namespace mathlink
