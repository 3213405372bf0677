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

#ifndef MATHLINK_LATEX_H_
#define MATHLINK_LATEX_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mathlink/types.h"

namespace mathlink {

enum class Preprocess { kNone, kLatexToText };

std::string_view PreprocessName(Preprocess preprocess);
// Accepts "none" and "latex2text".
std::optional<Preprocess> ParsePreprocess(std::string_view name);

// Text after preprocessing together with the map back to the original.
struct CleanText {
  std::u32string text;
  // char_map[i] is the original index of text[i]. One extra trailing entry
  // holds the original length so half-open ends map cleanly.
  std::vector<int> char_map;
  // Recoverable problems, e.g. an unbalanced math delimiter.
  std::vector<std::string> warnings;
};

CleanText IdentityText(std::u32string_view original);

// Strips LaTeX markup from text-mode content. Math-mode segments ($..$,
// $$..$$, \(..\), \[..\] and the standard display environments) are copied
// verbatim. Markup commands are dropped while their brace arguments are
// kept; reference-like commands (\label, \ref, \cite, ...) are dropped with
// their argument.
CleanText LatexToText(std::u32string_view original);

CleanText PreprocessText(std::u32string_view original, Preprocess preprocess);

// Both take a char_map including its end sentinel.
// Clean-text span covering every surviving character of an original span,
// or nullopt when the whole span was removed.
std::optional<CharSpan> ProjectToClean(const std::vector<int> &char_map, CharSpan original);

// Original-text span from the first to the last character of a clean span.
CharSpan ProjectToOriginal(const std::vector<int> &char_map, CharSpan span);

}  // namespace mathlink

#endif  // MATHLINK_LATEX_H_
