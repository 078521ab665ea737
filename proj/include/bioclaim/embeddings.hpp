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
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bioclaim {

// Word-vector store loaded from a `.vec` text file (header "count dim",
// then one word plus dim floats per line). Immutable after load.
struct EmbeddingTable {
  size_t dim = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;
};

struct DocVector {
  std::vector<double> values;
  int n_known = 0;  // token occurrences found in the table
};

inline EmbeddingTable load_vec(const std::string& path,
                               std::optional<size_t> limit = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_vec: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_vec: empty file " + path);
  std::istringstream header(line);
  long long count = 0, dim = 0;
  if (!(header >> count >> dim) || count < 0 || dim <= 0) {
    throw std::runtime_error("load_vec: malformed header line 1 in " + path);
  }
  EmbeddingTable table;
  table.dim = static_cast<size_t>(dim);
  table.vectors.reserve(
      limit ? std::min<size_t>(*limit, size_t(count)) : size_t(count));
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (limit && table.vectors.size() >= *limit) break;
    std::istringstream row(line);
    std::string word;
    row >> word;
    std::vector<float> vec;
    vec.reserve(table.dim);
    float v;
    while (row >> v) vec.push_back(v);
    if (vec.size() != table.dim) {
      throw std::runtime_error("load_vec: line " + std::to_string(line_no) +
                               " has " + std::to_string(vec.size()) +
                               " values, expected " +
                               std::to_string(table.dim));
    }
    auto [it, inserted] = table.vectors.emplace(word, std::move(vec));
    if (!inserted) {
      std::cerr << "load_vec: duplicate word '" << word << "' at line "
                << line_no << ", keeping first\n";
    }
  }
  return table;
}

inline std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Arithmetic mean of the vectors of tokens present in the table. Lookup
// tries the exact token, then its ASCII-lowercased form. Tokens missing
// under both are left out of the mean; all-OOV documents get a zero vector.
inline DocVector embed_document(const std::vector<std::string>& tokens,
                                const EmbeddingTable& table) {
  DocVector doc;
  doc.values.assign(table.dim, 0.0);
  for (const auto& tok : tokens) {
    auto it = table.vectors.find(tok);
    if (it == table.vectors.end()) {
      it = table.vectors.find(ascii_lower(tok));
      if (it == table.vectors.end()) continue;
    }
    for (size_t d = 0; d < table.dim; ++d) doc.values[d] += it->second[d];
    ++doc.n_known;
  }
  if (doc.n_known > 0) {
    for (double& v : doc.values) v /= doc.n_known;
  }
  return doc;
}

}  // namespace bioclaim
