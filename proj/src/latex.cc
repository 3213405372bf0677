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

#include "mathlink/latex.h"

#include <algorithm>
#include <array>

#include "mathlink/utf8.h"

namespace mathlink {
namespace {

constexpr std::array<std::u32string_view, 16> kMathEnvironments = {
    U"equation", U"equation*", U"align",     U"align*",     U"gather",   U"gather*",
    U"multline", U"multline*", U"eqnarray",  U"eqnarray*",  U"flalign",  U"flalign*",
    U"alignat",  U"alignat*",  U"displaymath", U"math"};

// Commands whose argument is not running text.
constexpr std::array<std::u32string_view, 16> kDropArgumentCommands = {
    U"label",   U"ref",      U"eqref",  U"pageref",         U"cite",
    U"citep",   U"citet",    U"citeauthor", U"url",          U"includegraphics",
    U"bibliography", U"bibliographystyle", U"vspace", U"hspace", U"cref", U"Cref"};

bool IsAsciiLetter(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

template <size_t N>
bool Contains(const std::array<std::u32string_view, N> &set, std::u32string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

class LatexStripper {
 public:
  explicit LatexStripper(std::u32string_view src) : src_(src) {}

  CleanText Run() {
    size_t i = 0;
    while (i < src_.size()) i = Step(i);
    out_.char_map.push_back(static_cast<int>(src_.size()));
    return std::move(out_);
  }

 private:
  void Emit(char32_t c, size_t original) {
    out_.text.push_back(c);
    out_.char_map.push_back(static_cast<int>(original));
  }

  void EmitVerbatim(size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k) Emit(src_[k], k);
  }

  void Warn(const std::string &what, size_t pos) {
    out_.warnings.push_back(what + " at offset " + std::to_string(pos));
  }

  bool IsEscaped(size_t pos) const {
    size_t backslashes = 0;
    while (pos > backslashes && src_[pos - backslashes - 1] == U'\\') ++backslashes;
    return backslashes % 2 == 1;
  }

  size_t FindUnescaped(std::u32string_view needle, size_t from) const {
    for (size_t pos = src_.find(needle, from); pos != std::u32string_view::npos;
         pos = src_.find(needle, pos + 1)) {
      if (!IsEscaped(pos)) return pos;
    }
    return std::u32string_view::npos;
  }

  size_t SkipSpaces(size_t pos) const {
    while (pos < src_.size() && (src_[pos] == U' ' || src_[pos] == U'\t')) ++pos;
    return pos;
  }

  // Skips a balanced group opened by `open` at pos; returns pos unchanged if
  // there is none, or the end of text if it never closes.
  size_t SkipGroup(size_t pos, char32_t open, char32_t close) const {
    if (pos >= src_.size() || src_[pos] != open) return pos;
    int depth = 0;
    for (size_t k = pos; k < src_.size(); ++k) {
      if (src_[k] == U'\\') {
        ++k;
        continue;
      }
      if (src_[k] == open) ++depth;
      if (src_[k] == close && --depth == 0) return k + 1;
    }
    return src_.size();
  }

  // Copies a math segment that opens at `begin` with `open_len` delimiter
  // characters and closes with `closer`.
  size_t MathSegment(size_t begin, size_t open_len, std::u32string_view closer) {
    size_t close = FindUnescaped(closer, begin + open_len);
    if (close == std::u32string_view::npos) {
      Warn("unbalanced math delimiter", begin);
      EmitVerbatim(begin, begin + open_len);
      return begin + open_len;
    }
    size_t end = close + closer.size();
    EmitVerbatim(begin, end);
    return end;
  }

  size_t Step(size_t i) {
    const char32_t c = src_[i];
    switch (c) {
      case U'%': {
        size_t eol = src_.find(U'\n', i);
        return eol == std::u32string_view::npos ? src_.size() : eol;
      }
      case U'$':
        if (i + 1 < src_.size() && src_[i + 1] == U'$') return MathSegment(i, 2, U"$$");
        return MathSegment(i, 1, U"$");
      case U'{':
      case U'}':
        return i + 1;
      case U'~':
        Emit(U' ', i);
        return i + 1;
      case U'\\':
        return Command(i);
      default:
        Emit(c, i);
        return i + 1;
    }
  }

  size_t Command(size_t i) {
    if (i + 1 >= src_.size()) {
      Emit(U'\\', i);
      return i + 1;
    }
    const char32_t next = src_[i + 1];
    switch (next) {
      case U'(':
        return MathSegment(i, 2, U"\\)");
      case U'[':
        return MathSegment(i, 2, U"\\]");
      case U'\\':
        Emit(U'\n', i);
        return i + 2;
      case U'%': case U'$': case U'&': case U'_': case U'#': case U'{': case U'}':
        Emit(next, i + 1);
        return i + 2;
      case U' ':
        Emit(U' ', i + 1);
        return i + 2;
      case U',': case U';': case U':':
        Emit(U' ', i);
        return i + 2;
      case U'\'': case U'`': case U'^': case U'"': case U'~': case U'=': case U'.':
        // Accent; the accented letter follows and is kept.
        return i + 2;
      default:
        break;
    }
    if (!IsAsciiLetter(next)) return i + 1;

    size_t name_end = i + 1;
    while (name_end < src_.size() && IsAsciiLetter(src_[name_end])) ++name_end;
    if (name_end < src_.size() && src_[name_end] == U'*') ++name_end;
    const std::u32string_view name = src_.substr(i + 1, name_end - i - 1);

    if (name == U"begin" || name == U"end") return Environment(i, name_end, name == U"begin");
    if (Contains(kDropArgumentCommands, name)) {
      size_t pos = SkipSpaces(name_end);
      pos = SkipGroup(pos, U'[', U']');
      return SkipGroup(pos, U'{', U'}');
    }
    return name_end;
  }

  size_t Environment(size_t i, size_t name_end, bool begin) {
    size_t arg = SkipSpaces(name_end);
    if (arg >= src_.size() || src_[arg] != U'{') return name_end;
    size_t arg_end = src_.find(U'}', arg);
    if (arg_end == std::u32string_view::npos) return name_end;
    const std::u32string_view env = src_.substr(arg + 1, arg_end - arg - 1);
    if (begin && Contains(kMathEnvironments, env)) {
      std::u32string closer = U"\\end{";
      closer += env;
      closer += U'}';
      size_t close = FindUnescaped(closer, arg_end + 1);
      if (close == std::u32string_view::npos) {
        Warn("unbalanced math environment", i);
        EmitVerbatim(i, arg_end + 1);
        return arg_end + 1;
      }
      size_t end = close + closer.size();
      EmitVerbatim(i, end);
      return end;
    }
    size_t pos = arg_end + 1;
    if (begin) pos = SkipGroup(pos, U'[', U']');
    return pos;
  }

  std::u32string_view src_;
  CleanText out_;
};

}  // namespace

std::string_view PreprocessName(Preprocess preprocess) {
  return preprocess == Preprocess::kNone ? "none" : "latex2text";
}

std::optional<Preprocess> ParsePreprocess(std::string_view name) {
  if (name == "none") return Preprocess::kNone;
  if (name == "latex2text") return Preprocess::kLatexToText;
  return std::nullopt;
}

CleanText IdentityText(std::u32string_view original) {
  CleanText clean;
  clean.text = std::u32string(original);
  clean.char_map.resize(original.size() + 1);
  for (size_t i = 0; i <= original.size(); ++i) clean.char_map[i] = static_cast<int>(i);
  return clean;
}

CleanText LatexToText(std::u32string_view original) {
  return LatexStripper(original).Run();
}

CleanText PreprocessText(std::u32string_view original, Preprocess preprocess) {
  return preprocess == Preprocess::kNone ? IdentityText(original) : LatexToText(original);
}

std::optional<CharSpan> ProjectToClean(const std::vector<int> &char_map, CharSpan original) {
  const auto begin = char_map.begin();
  const auto end = char_map.end() - 1;
  const int lo = static_cast<int>(std::lower_bound(begin, end, original.start) - begin);
  const int hi = static_cast<int>(std::lower_bound(begin, end, original.end) - begin);
  if (lo >= hi) return std::nullopt;
  return CharSpan{lo, hi};
}

CharSpan ProjectToOriginal(const std::vector<int> &char_map, CharSpan span) {
  if (span.start >= span.end) {
    const int at = char_map[span.start];
    return {at, at};
  }
  return {char_map[span.start], char_map[span.end - 1] + 1};
}

}  // namespace mathlink
