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

#include "mathlink/tokenizer.h"

#include <fstream>

#include "mathlink/errors.h"
#include "mathlink/utf8.h"

namespace mathlink {
namespace {

bool IsSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0xA0 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 ||
         c == 0x3000;
}

bool IsPunctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
           (c >= 123 && c <= 126);
  }
  return (c >= 0x2010 && c <= 0x205F) || (c >= 0x3000 && c <= 0x303F) ||
         (c >= 0x2200 && c <= 0x22FF);
}

char32_t Lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

}  // namespace

TokenId HashToken(std::string_view token) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<TokenId>(h & 0x7FFFFFFFFFFFFFFFULL);
}

Tokenizer::Tokenizer(std::vector<std::string> vocab, bool lowercase)
    : vocab_(std::move(vocab)), lowercase_(lowercase) {
  for (size_t i = 0; i < vocab_.size(); ++i) {
    index_.emplace(vocab_[i], static_cast<TokenId>(i));
  }
  if (auto it = index_.find(std::string(kUnknownToken)); it != index_.end()) {
    unknown_id_ = it->second;
  }
}

Tokenizer Tokenizer::FromVocabFile(const std::filesystem::path &path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary " + path.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  if (vocab.empty()) throw FormatError("empty vocabulary " + path.string());
  return Tokenizer(std::move(vocab), lowercase);
}

TokenizedDocument Tokenizer::Tokenize(std::u32string_view text) const {
  return Tokenize(IdentityText(text));
}

TokenizedDocument Tokenizer::Tokenize(CleanText clean) const {
  TokenizedDocument out;
  out.text = std::move(clean.text);
  out.char_map = std::move(clean.char_map);
  const std::u32string_view text = out.text;
  const int n = static_cast<int>(text.size());
  int i = 0;
  while (i < n) {
    if (IsSpace(text[i])) {
      ++i;
    } else if (IsPunctuation(text[i])) {
      AppendWord(text, i, i + 1, &out);
      ++i;
    } else {
      int j = i;
      while (j < n && !IsSpace(text[j]) && !IsPunctuation(text[j])) ++j;
      AppendWord(text, i, j, &out);
      i = j;
    }
  }
  return out;
}

void Tokenizer::AppendWord(std::u32string_view text, int begin, int end,
                           TokenizedDocument *out) const {
  std::u32string word(text.substr(begin, end - begin));
  if (lowercase_) {
    for (auto &c : word) c = Lower(c);
  }
  if (!has_vocab()) {
    std::string token = EncodeUtf8(word);
    out->ids.push_back(HashToken(token));
    out->tokens.push_back(std::move(token));
    out->offsets.push_back({begin, end});
    return;
  }

  auto unknown = [&] {
    out->tokens.emplace_back(kUnknownToken);
    out->ids.push_back(unknown_id_);
    out->offsets.push_back({begin, end});
  };
  const int length = end - begin;
  if (length > kMaxWordChars) {
    unknown();
    return;
  }
  // Greedy longest match; any unmatched remainder turns the whole word into
  // one unknown token.
  std::vector<std::pair<std::string, CharSpan>> pieces;
  int start = 0;
  while (start < length) {
    int stop = length;
    bool found = false;
    while (stop > start) {
      std::string piece = EncodeUtf8(std::u32string_view(word).substr(start, stop - start));
      if (start > 0) piece = "##" + piece;
      if (index_.count(piece)) {
        pieces.push_back({std::move(piece), {begin + start, begin + stop}});
        found = true;
        break;
      }
      --stop;
    }
    if (!found) {
      unknown();
      return;
    }
    start = stop;
  }
  for (auto &[piece, span] : pieces) {
    out->ids.push_back(index_.at(piece));
    out->tokens.push_back(std::move(piece));
    out->offsets.push_back(span);
  }
}

}  // namespace mathlink
