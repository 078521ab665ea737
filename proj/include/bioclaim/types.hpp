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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bioclaim {

// Half-open byte range [begin, end) into a UTF-8 string.
struct CharSpan {
  size_t begin = 0;
  size_t end = 0;

  bool overlaps(const CharSpan& other) const {
    return begin < other.end && other.begin < end;
  }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

enum class Label3 { NonClaim, ExplicitClaim, ImplicitClaim };
enum class BinaryLabel { NonClaim, Claim };

enum class Topic { Covid19, Measles, CysticFibrosis, Depression };
enum class QueryCategory { DiseaseName, TopicalHashtag, Combination, Drug };

inline const char* to_string(Label3 l) {
  switch (l) {
    case Label3::NonClaim: return "non_claim";
    case Label3::ExplicitClaim: return "explicit";
    case Label3::ImplicitClaim: return "implicit";
  }
  return "?";
}

inline const char* to_string(BinaryLabel l) {
  return l == BinaryLabel::Claim ? "claim" : "non_claim";
}

inline const char* to_string(Topic t) {
  switch (t) {
    case Topic::Covid19: return "covid19";
    case Topic::Measles: return "measles";
    case Topic::CysticFibrosis: return "cystic_fibrosis";
    case Topic::Depression: return "depression";
  }
  return "?";
}

inline const char* to_string(QueryCategory c) {
  switch (c) {
    case QueryCategory::DiseaseName: return "disease_name";
    case QueryCategory::TopicalHashtag: return "topical_hashtag";
    case QueryCategory::Combination: return "combination";
    case QueryCategory::Drug: return "drug";
  }
  return "?";
}

inline Label3 label3_from_string(const std::string& s) {
  if (s == "non_claim") return Label3::NonClaim;
  if (s == "explicit") return Label3::ExplicitClaim;
  if (s == "implicit") return Label3::ImplicitClaim;
  throw std::runtime_error("unknown label: '" + s + "'");
}

inline Topic topic_from_string(const std::string& s) {
  if (s == "covid19") return Topic::Covid19;
  if (s == "measles") return Topic::Measles;
  if (s == "cystic_fibrosis") return Topic::CysticFibrosis;
  if (s == "depression") return Topic::Depression;
  throw std::runtime_error("unknown topic: '" + s + "'");
}

inline QueryCategory query_category_from_string(const std::string& s) {
  if (s == "disease_name") return QueryCategory::DiseaseName;
  if (s == "topical_hashtag") return QueryCategory::TopicalHashtag;
  if (s == "combination") return QueryCategory::Combination;
  if (s == "drug") return QueryCategory::Drug;
  throw std::runtime_error("unknown query category: '" + s + "'");
}

inline BinaryLabel to_binary(Label3 l) {
  return l == Label3::NonClaim ? BinaryLabel::NonClaim : BinaryLabel::Claim;
}

constexpr Topic kAllTopics[] = {Topic::Covid19, Topic::Measles,
                                Topic::CysticFibrosis, Topic::Depression};
constexpr QueryCategory kAllQueryCategories[] = {
    QueryCategory::DiseaseName, QueryCategory::TopicalHashtag,
    QueryCategory::Combination, QueryCategory::Drug};

}  // namespace bioclaim
