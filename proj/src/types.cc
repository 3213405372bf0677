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

#include "mathlink/types.h"

namespace mathlink {

std::string_view EntityTypeName(EntityType type) {
  switch (type) {
    case EntityType::kSymbol: return "SYMBOL";
    case EntityType::kPrimary: return "PRIMARY";
    case EntityType::kOrdered: return "ORDERED";
  }
  return "?";
}

std::optional<EntityType> ParseEntityType(std::string_view name) {
  for (EntityType type : kAllEntityTypes) {
    if (EntityTypeName(type) == name) return type;
  }
  return std::nullopt;
}

std::string_view RelationTypeName(RelationType type) {
  switch (type) {
    case RelationType::kDirect: return "Direct";
    case RelationType::kCount: return "Count";
    case RelationType::kCoreferSymbol: return "Corefer-Symbol";
    case RelationType::kCoreferDescription: return "Corefer-Description";
  }
  return "?";
}

std::optional<RelationType> ParseRelationType(std::string_view name) {
  for (RelationType type : kAllRelationTypes) {
    if (RelationTypeName(type) == name) return type;
  }
  return std::nullopt;
}

std::string_view DomainName(Domain domain) {
  switch (domain) {
    case Domain::kCs: return "cs";
    case Domain::kEcon: return "econ";
    case Domain::kMath: return "math";
    case Domain::kPhysics: return "physics";
    case Domain::kUnknown: return "unknown";
  }
  return "unknown";
}

Domain ParseDomain(std::string_view name) {
  for (Domain domain : kAllDomains) {
    if (DomainName(domain) == name) return domain;
  }
  return Domain::kUnknown;
}

std::string ToString(const TokenSpan &span) {
  return "(" + std::to_string(span.start) + "," + std::to_string(span.end) + ")";
}

}  // namespace mathlink
