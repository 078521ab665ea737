// Copyright 2026 The bioclaim Authors
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

#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "bioclaim/types.hpp"

namespace bioclaim {

struct Token {
  std::string text;
  size_t begin = 0;  // byte offsets into the source string, half-open
  size_t end = 0;
};

struct TokenizedDoc {
  std::vector<std::string> tokens;
  std::string source_id;
};

namespace detail {

// Bytes >= 0x80 belong to multi-byte UTF-8 sequences and are never treated
// as punctuation, so tokenization cannot split inside a code point.
inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

inline bool is_punct_byte(unsigned char c) {
  return !is_word_byte(c) && std::isspace(c) == 0;
}

}  // namespace detail

// Replaces every maximal run of '@' + word characters by the literal
// "@username". Everything else is copied through unchanged.
inline std::string normalize_mentions(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '@' && i + 1 < text.size() &&
        (std::isalnum(static_cast<unsigned char>(text[i + 1])) != 0 ||
         text[i + 1] == '_')) {
      size_t j = i + 1;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) != 0 ||
              text[j] == '_')) {
        ++j;
      }
      out += "@username";
      i = j;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

// Whitespace-splitting tokenizer with edge-punctuation stripping:
//  - leading '#' or '@' stays attached when a word character follows
//    ("#measles", "@username" are single tokens),
//  - internal punctuation is kept ("don't", "1/1000", "M-M-R"),
//  - leading/trailing punctuation characters become their own tokens.
// Every token is a verbatim substring of the input; offsets are byte based.
inline std::vector<Token> tokenize_with_offsets(const std::string& text) {
  using detail::is_punct_byte;
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(text[i])) != 0) {
      ++i;
      continue;
    }
    size_t chunk_end = i;
    while (chunk_end < n &&
           std::isspace(static_cast<unsigned char>(text[chunk_end])) == 0) {
      ++chunk_end;
    }
    size_t lo = i;
    size_t hi = chunk_end;
    // leading punctuation, except a sigil glued to a following word
    while (lo < hi && is_punct_byte(static_cast<unsigned char>(text[lo]))) {
      if ((text[lo] == '#' || text[lo] == '@') && lo + 1 < hi &&
          !is_punct_byte(static_cast<unsigned char>(text[lo + 1]))) {
        break;
      }
      tokens.push_back({text.substr(lo, 1), lo, lo + 1});
      ++lo;
    }
    size_t core_hi = hi;
    while (core_hi > lo &&
           is_punct_byte(static_cast<unsigned char>(text[core_hi - 1]))) {
      --core_hi;
    }
    if (core_hi > lo) {
      tokens.push_back({text.substr(lo, core_hi - lo), lo, core_hi});
    }
    for (size_t k = core_hi; k < hi; ++k) {
      tokens.push_back({text.substr(k, 1), k, k + 1});
    }
    i = chunk_end;
  }
  return tokens;
}

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_with_offsets(text)) {
    out.push_back(std::move(t.text));
  }
  return out;
}

inline TokenizedDoc tokenize_doc(const std::string& text,
                                 std::string source_id) {
  return TokenizedDoc{tokenize(text), std::move(source_id)};
}

}  // namespace bioclaim
