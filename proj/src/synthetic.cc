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

#include "mathlink/synthetic.h"

#include <array>
#include <random>
#include <string_view>

#include "mathlink/errors.h"
#include "mathlink/utf8.h"

namespace mathlink {
namespace {

constexpr std::array<std::string_view, 12> kSymbols = {
    "x", "y", "z", "k", "n", "m", "t", "v", "\\alpha", "\\beta", "\\lambda", "\\sigma"};

constexpr std::array<std::string_view, 14> kDescriptions = {
    "velocity",        "mass",           "temperature",   "learning rate",
    "step size",       "number of nodes", "price level",   "interest rate",
    "wave vector",     "damping factor", "sample size",   "spectral radius",
    "growth rate",     "kernel width"};

constexpr std::array<std::string_view, 24> kFiller = {
    "we",      "consider", "the",     "model",    "results",  "show",
    "that",    "system",   "is",      "stable",   "in",       "this",
    "paper",   "method",   "our",     "approach", "extends",  "previous",
    "work",    "on",       "general", "settings", "analysis", "follows"};

// Pieces of a planted pattern: prefix, symbol, middle, description, suffix.
// Either the symbol or the description comes first.
struct Template {
  std::string_view before;
  std::string_view between;
  std::string_view after;
  bool symbol_first;
};

constexpr std::array<Template, 4> kTemplates = {{
    {"Let $", "$ denote the ", ".", true},
    {"where $", "$ is the ", ".", true},
    {"The ", " is written $", "$.", false},
    {"We call the ", " simply $", "$.", false},
}};

size_t Pick(std::mt19937_64 &rng, size_t n) { return static_cast<size_t>(rng() % n); }

std::string FillerSentence(std::mt19937_64 &rng) {
  const size_t words = 4 + Pick(rng, 5);
  std::string out;
  for (size_t i = 0; i < words; ++i) {
    std::string word(kFiller[Pick(rng, kFiller.size())]);
    if (i == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
    if (i > 0) out += ' ';
    out += word;
  }
  return out + ".";
}

}  // namespace

SyntheticCorpus GeneratePlantedCorpus(const SyntheticOptions &options) {
  if (options.num_documents < 0) throw ConfigError("num_documents must be non-negative");
  if (options.min_filler_sentences < 0 ||
      options.max_filler_sentences < options.min_filler_sentences) {
    throw ConfigError("filler sentence bounds must satisfy 0 <= min <= max");
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::array<Domain, 4> kDomains = {Domain::kCs, Domain::kEcon, Domain::kMath,
                                              Domain::kPhysics};
  SyntheticCorpus corpus;
  for (int d = 0; d < options.num_documents; ++d) {
    RawDocument doc;
    doc.id = "synthetic-" + std::to_string(d);
    doc.domain = kDomains[static_cast<size_t>(d) % kDomains.size()];

    const int span = options.max_filler_sentences - options.min_filler_sentences + 1;
    const int fillers = options.min_filler_sentences + static_cast<int>(Pick(rng, span));
    const int pattern_slot = static_cast<int>(Pick(rng, static_cast<size_t>(fillers) + 1));
    const std::string_view symbol = kSymbols[Pick(rng, kSymbols.size())];
    const std::string_view description = kDescriptions[Pick(rng, kDescriptions.size())];
    const Template &tmpl = kTemplates[Pick(rng, kTemplates.size())];

    std::string text;
    CharSpan symbol_span, description_span;
    auto append = [&](std::string_view piece) { text += piece; };
    auto offset = [&]() { return CodePointLength(text); };
    for (int s = 0; s <= fillers; ++s) {
      if (!text.empty()) text += ' ';
      if (s != pattern_slot) {
        text += FillerSentence(rng);
        continue;
      }
      append(tmpl.before);
      const std::string_view first = tmpl.symbol_first ? symbol : description;
      const std::string_view second = tmpl.symbol_first ? description : symbol;
      CharSpan &first_span = tmpl.symbol_first ? symbol_span : description_span;
      CharSpan &second_span = tmpl.symbol_first ? description_span : symbol_span;
      first_span.start = offset();
      append(first);
      first_span.end = offset();
      append(tmpl.between);
      second_span.start = offset();
      append(second);
      second_span.end = offset();
      append(tmpl.after);
    }

    if (options.mid_token_probability > 0.0 &&
        unit(rng) < options.mid_token_probability) {
      // Shift one or both description boundaries one character inwards so
      // they fall inside the first and last word.
      PlantedMismatch planted{doc.id, "T1", false, false};
      const size_t which = Pick(rng, 3);
      planted.start = which != 1;
      planted.end = which != 0;
      if (planted.start) description_span.start += 1;
      if (planted.end) description_span.end -= 1;
      corpus.mismatches.push_back(planted);
    }

    doc.text = std::move(text);
    doc.entities.push_back({"T1", EntityType::kPrimary, description_span});
    doc.entities.push_back({"T2", EntityType::kSymbol, symbol_span});
    doc.relations.push_back({RelationType::kDirect, "T1", "T2"});
    ValidateDocument(doc);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace mathlink
