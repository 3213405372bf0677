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

#ifndef MATHLINK_TOKENIZER_H_
#define MATHLINK_TOKENIZER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mathlink/latex.h"
#include "mathlink/types.h"

namespace mathlink {

using TokenId = std::int64_t;

struct TokenizedDocument {
  std::u32string text;              // the text that was tokenized
  std::vector<std::string> tokens;  // UTF-8; continuation pieces carry "##"
  std::vector<TokenId> ids;
  std::vector<CharSpan> offsets;    // into text, monotone, non-overlapping
  std::vector<int> char_map;        // text index -> original index, plus end sentinel

  int size() const { return static_cast<int>(tokens.size()); }

  // Character range covered by a token range.
  CharSpan CharsOf(TokenSpan span) const {
    return {offsets[span.start].start, offsets[span.end - 1].end};
  }
};

// Whitespace and punctuation splitting followed, when a vocabulary is
// loaded, by greedy longest-match WordPiece. Without a vocabulary every
// basic word is one token and ids are 63-bit hashes of the token text.
class Tokenizer {
 public:
  static constexpr std::string_view kUnknownToken = "[UNK]";
  static constexpr int kMaxWordChars = 100;

  Tokenizer() = default;
  Tokenizer(std::vector<std::string> vocab, bool lowercase);

  // One token per line, BERT vocab.txt layout.
  static Tokenizer FromVocabFile(const std::filesystem::path &path, bool lowercase);

  TokenizedDocument Tokenize(std::u32string_view text) const;
  TokenizedDocument Tokenize(CleanText clean) const;

  bool has_vocab() const { return !vocab_.empty(); }
  bool lowercase() const { return lowercase_; }
  const std::vector<std::string> &vocab() const { return vocab_; }

 private:
  void AppendWord(std::u32string_view text, int begin, int end, TokenizedDocument *out) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  bool lowercase_ = false;
  TokenId unknown_id_ = -1;
};

TokenId HashToken(std::string_view token);

}  // namespace mathlink

#endif  // MATHLINK_TOKENIZER_H_
