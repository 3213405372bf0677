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

#ifndef MATHLINK_TYPES_H_
#define MATHLINK_TYPES_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mathlink {

// Entity labels. A span is typed from the relations it takes part in.
enum class EntityType : int { kSymbol = 0, kPrimary = 1, kOrdered = 2 };
inline constexpr int kNumEntityTypes = 3;
inline constexpr std::array<EntityType, kNumEntityTypes> kAllEntityTypes = {
    EntityType::kSymbol, EntityType::kPrimary, EntityType::kOrdered};

enum class RelationType : int {
  kDirect = 0,
  kCount = 1,
  kCoreferSymbol = 2,
  kCoreferDescription = 3,
};
inline constexpr int kNumRelationTypes = 4;
inline constexpr std::array<RelationType, kNumRelationTypes> kAllRelationTypes = {
    RelationType::kDirect, RelationType::kCount, RelationType::kCoreferSymbol,
    RelationType::kCoreferDescription};

enum class Domain : int { kCs, kEcon, kMath, kPhysics, kUnknown };
inline constexpr std::array<Domain, 5> kAllDomains = {
    Domain::kCs, Domain::kEcon, Domain::kMath, Domain::kPhysics, Domain::kUnknown};

std::string_view EntityTypeName(EntityType type);
std::optional<EntityType> ParseEntityType(std::string_view name);

std::string_view RelationTypeName(RelationType type);
std::optional<RelationType> ParseRelationType(std::string_view name);

std::string_view DomainName(Domain domain);
// Unrecognized tags map to kUnknown.
Domain ParseDomain(std::string_view name);

// Half-open character range [start, end), in Unicode code points.
struct CharSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  auto operator<=>(const CharSpan &) const = default;
};

// Half-open token range [start, end).
struct TokenSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  bool Contains(const TokenSpan &other) const {
    return start <= other.start && other.end <= end;
  }
  auto operator<=>(const TokenSpan &) const = default;
};

inline bool Overlaps(const TokenSpan &a, const TokenSpan &b) {
  return a.start < b.end && b.start < a.end;
}

inline bool Overlaps(const CharSpan &a, const CharSpan &b) {
  return a.start < b.end && b.start < a.end;
}

std::string ToString(const TokenSpan &span);

}  // namespace mathlink

#endif  // MATHLINK_TYPES_H_
