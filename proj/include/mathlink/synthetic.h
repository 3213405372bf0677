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

#ifndef MATHLINK_SYNTHETIC_H_
#define MATHLINK_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mathlink/corpus.h"

namespace mathlink {

struct SyntheticOptions {
  int num_documents = 20;
  uint64_t seed = 7;
  int min_filler_sentences = 2;
  int max_filler_sentences = 4;
  // Probability that a description annotation is moved off a token boundary.
  double mid_token_probability = 0.0;
};

// An annotation deliberately planted inside a token.
struct PlantedMismatch {
  std::string document;
  std::string entity;
  bool start = false;
  bool end = false;
};

struct SyntheticCorpus {
  std::vector<RawDocument> documents;
  std::vector<PlantedMismatch> mismatches;
};

// Small LaTeX-flavoured documents, each with filler prose and exactly one
// "symbol is described by phrase" pattern annotated as a Direct relation
// from the description (PRIMARY) to the symbol (SYMBOL). Deterministic in
// the seed.
SyntheticCorpus GeneratePlantedCorpus(const SyntheticOptions &options);

}  // namespace mathlink

#endif  // MATHLINK_SYNTHETIC_H_
