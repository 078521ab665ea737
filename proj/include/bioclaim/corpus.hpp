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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "bioclaim/preprocess.hpp"
#include "bioclaim/rng.hpp"
#include "bioclaim/types.hpp"

namespace bioclaim {

// One annotated tweet of the released corpus. claim_span uses byte offsets
// into the UTF-8 text and is present exactly for explicit claims.
struct TweetRecord {
  std::string id;
  std::string text;
  Topic topic = Topic::Covid19;
  QueryCategory query_category = QueryCategory::DiseaseName;
  Label3 label = Label3::NonClaim;
  std::optional<CharSpan> claim_span;
  std::optional<std::string> inferred_claim;
};

// One tweet of the raw acquisition dump, before filtering and sampling.
struct RawTweet {
  std::string id;
  std::string text;
  bool is_retweet = false;
  Topic topic = Topic::Covid19;
  QueryCategory query_category = QueryCategory::DiseaseName;
};

enum class EssaySplit { Train, Dev, Test };

inline const char* to_string(EssaySplit s) {
  switch (s) {
    case EssaySplit::Train: return "train";
    case EssaySplit::Dev: return "dev";
    case EssaySplit::Test: return "test";
  }
  return "?";
}

struct EssayParagraph {
  std::string essay_id;
  int paragraph_index = 0;
  std::vector<std::string> tokens;
  bool claim = false;  // true iff any token tag names Claim or MajorClaim
  EssaySplit split = EssaySplit::Train;
};

struct EssayCorpus {
  std::vector<EssayParagraph> train, dev, test;
};

// ---------------------------------------------------------------------------
// JSONL corpus ingestion
// ---------------------------------------------------------------------------

namespace detail {

inline std::runtime_error line_error(const std::string& path, size_t line_no,
                                     const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                            what);
}

inline std::string require_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw std::runtime_error(std::string("missing or non-string field '") +
                             key + "'");
  return j[key].get<std::string>();
}

}  // namespace detail

inline nlohmann::ordered_json tweet_to_json(const TweetRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["topic"] = to_string(r.topic);
  j["query_category"] = to_string(r.query_category);
  j["label"] = to_string(r.label);
  if (r.claim_span) j["claim_span"] = {r.claim_span->begin, r.claim_span->end};
  if (r.inferred_claim) j["inferred_claim"] = *r.inferred_claim;
  return j;
}

inline TweetRecord tweet_from_json(const nlohmann::json& j) {
  TweetRecord r;
  r.id = detail::require_string(j, "id");
  if (r.id.empty()) throw std::runtime_error("empty field 'id'");
  r.text = detail::require_string(j, "text");
  r.topic = topic_from_string(detail::require_string(j, "topic"));
  r.query_category =
      query_category_from_string(detail::require_string(j, "query_category"));
  r.label = label3_from_string(detail::require_string(j, "label"));
  if (j.contains("claim_span")) {
    const auto& s = j["claim_span"];
    auto offset_ok = [](const nlohmann::json& v) {
      return v.is_number_integer() &&
             (v.is_number_unsigned() || v.get<long long>() >= 0);
    };
    if (!s.is_array() || s.size() != 2 || !offset_ok(s[0]) || !offset_ok(s[1]))
      throw std::runtime_error(
          "field 'claim_span' must be [start,end] with non-negative ints");
    r.claim_span = CharSpan{s[0].get<size_t>(), s[1].get<size_t>()};
  }
  if (j.contains("inferred_claim")) {
    r.inferred_claim = detail::require_string(j, "inferred_claim");
  }
  // invariants
  if (r.label == Label3::ExplicitClaim) {
    if (!r.claim_span)
      throw std::runtime_error("label 'explicit' requires field 'claim_span'");
    if (!(r.claim_span->begin < r.claim_span->end &&
          r.claim_span->end <= r.text.size()))
      throw std::runtime_error(
          "field 'claim_span' [" + std::to_string(r.claim_span->begin) + "," +
          std::to_string(r.claim_span->end) + ") outside text of length " +
          std::to_string(r.text.size()));
  } else if (r.claim_span) {
    throw std::runtime_error("field 'claim_span' only allowed with label "
                             "'explicit'");
  }
  if (r.inferred_claim && r.label != Label3::ImplicitClaim) {
    throw std::runtime_error(
        "field 'inferred_claim' only allowed with label 'implicit'");
  }
  return r;
}

inline std::vector<TweetRecord> load_tweet_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_tweet_corpus: cannot open " + path);
  std::vector<TweetRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      TweetRecord r = tweet_from_json(j);
      if (!seen_ids.insert(r.id).second)
        throw std::runtime_error("duplicate id '" + r.id + "'");
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw detail::line_error(path, line_no, e.what());
    }
  }
  return records;
}

inline nlohmann::ordered_json raw_to_json(const RawTweet& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["is_retweet"] = r.is_retweet;
  j["topic"] = to_string(r.topic);
  j["query_category"] = to_string(r.query_category);
  return j;
}

inline RawTweet raw_from_json(const nlohmann::json& j) {
  RawTweet r;
  r.id = detail::require_string(j, "id");
  if (r.id.empty()) throw std::runtime_error("empty field 'id'");
  r.text = detail::require_string(j, "text");
  if (!j.contains("is_retweet") || !j["is_retweet"].is_boolean())
    throw std::runtime_error("missing or non-boolean field 'is_retweet'");
  r.is_retweet = j["is_retweet"].get<bool>();
  r.topic = topic_from_string(detail::require_string(j, "topic"));
  r.query_category =
      query_category_from_string(detail::require_string(j, "query_category"));
  return r;
}

inline std::vector<RawTweet> load_raw_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_raw_dump: cannot open " + path);
  std::vector<RawTweet> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(raw_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw detail::line_error(path, line_no, e.what());
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Acquisition filtering and stratified sampling
// ---------------------------------------------------------------------------

inline bool contains_url(const std::string& text) {
  if (text.find("http://") != std::string::npos) return true;
  if (text.find("https://") != std::string::npos) return true;
  // a whitespace-delimited token starting with "www."
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i])) != 0)
      ++i;
    if (i + 4 <= text.size() && text.compare(i, 4, "www.") == 0) return true;
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i])) == 0)
      ++i;
  }
  return false;
}

// Drops retweets and URL-bearing tweets, then deduplicates by id keeping the
// first occurrence. Order-preserving and idempotent.
inline std::vector<RawTweet> filter_acquisition(
    const std::vector<RawTweet>& records) {
  std::vector<RawTweet> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (r.is_retweet) continue;
    if (contains_url(r.text)) continue;
    if (!seen.insert(r.id).second) continue;
    out.push_back(r);
  }
  return out;
}

// Draws exactly per_cell records from every (topic, query_category) cell,
// uniformly without replacement. Selected records keep their input order
// within a cell; cells are emitted in enum order. Deterministic per seed.
inline std::vector<RawTweet> stratified_sample(
    const std::vector<RawTweet>& records, size_t per_cell, uint64_t seed) {
  std::map<std::pair<int, int>, std::vector<size_t>> cells;
  for (size_t i = 0; i < records.size(); ++i) {
    cells[{int(records[i].topic), int(records[i].query_category)}].push_back(
        i);
  }
  Rng rng(seed);
  std::vector<RawTweet> out;
  out.reserve(per_cell * cells.size());
  for (auto& [key, idx] : cells) {
    if (idx.size() < per_cell) {
      throw std::runtime_error(
          std::string("stratified_sample: cell (") +
          to_string(Topic(key.first)) + ", " +
          to_string(QueryCategory(key.second)) + ") has " +
          std::to_string(idx.size()) + " records, needs " +
          std::to_string(per_cell));
    }
    // partial Fisher-Yates, then restore input order within the cell
    std::vector<size_t> pool = idx;
    std::vector<size_t> chosen;
    chosen.reserve(per_cell);
    for (size_t k = 0; k < per_cell; ++k) {
      size_t j = k + size_t(rng.bounded(pool.size() - k));
      std::swap(pool[k], pool[j]);
      chosen.push_back(pool[k]);
    }
    std::sort(chosen.begin(), chosen.end());
    for (size_t i : chosen) out.push_back(records[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Essay corpus (paragraph-level CONLL)
// ---------------------------------------------------------------------------

namespace detail {

// Tag type between the B-/I- prefix and an optional ':'-separated suffix.
inline bool tag_names_claim(const std::string& tag) {
  std::string t = tag;
  if (t.rfind("B-", 0) == 0 || t.rfind("I-", 0) == 0) t = t.substr(2);
  size_t colon = t.find(':');
  if (colon != std::string::npos) t = t.substr(0, colon);
  return t == "Claim" || t == "MajorClaim";
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  if (line.find('\t') != std::string::npos) {
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
  } else {
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
  }
  return fields;
}

inline bool blank_line(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

inline std::vector<EssayParagraph> parse_conll_file(const std::string& path,
                                                    EssaySplit split) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_essay_conll: cannot open " + path);
  std::string essay_id = std::filesystem::path(path).stem().string();
  std::vector<EssayParagraph> paragraphs;
  EssayParagraph current;
  current.essay_id = essay_id;
  current.split = split;
  size_t expected_fields = 0;
  size_t line_no = 0;
  std::string line;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      current.paragraph_index = int(paragraphs.size());
      paragraphs.push_back(current);
      current.tokens.clear();
      current.claim = false;
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_line(line)) {
      flush();
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() < 2) {
      throw line_error(path, line_no,
                       "expected at least token and tag columns");
    }
    if (expected_fields == 0) {
      expected_fields = fields.size();
    } else if (fields.size() != expected_fields) {
      throw line_error(path, line_no,
                       "inconsistent column count (" +
                           std::to_string(fields.size()) + " vs " +
                           std::to_string(expected_fields) + ")");
    }
    current.tokens.push_back(fields.front());
    if (tag_names_claim(fields.back())) current.claim = true;
  }
  flush();
  return paragraphs;
}

inline std::string find_split_file(const std::string& dir,
                                   const std::string& split_name) {
  namespace fs = std::filesystem;
  std::vector<std::string> matches;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string stem = entry.path().stem().string();
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) {
      return char(std::tolower(c));
    });
    if (stem.rfind(split_name, 0) == 0) matches.push_back(entry.path().string());
  }
  if (matches.empty())
    throw std::runtime_error("load_essay_conll: no '" + split_name +
                             "' file in " + dir);
  if (matches.size() > 1) {
    std::sort(matches.begin(), matches.end());
    throw std::runtime_error("load_essay_conll: multiple '" + split_name +
                             "' files in " + dir + " (" + matches[0] + ", " +
                             matches[1] + ", ...)");
  }
  return matches.front();
}

}  // namespace detail

// Loads the paragraph-level CONLL corpus from a directory holding one
// train/dev/test file each (token per line, blank line between paragraphs,
// tag in the last column). A paragraph is a claim paragraph iff any tag
// names Claim or MajorClaim; the two types count as equivalent.
inline EssayCorpus load_essay_conll(const std::string& dir) {
  EssayCorpus corpus;
  corpus.train = detail::parse_conll_file(
      detail::find_split_file(dir, "train"), EssaySplit::Train);
  corpus.dev = detail::parse_conll_file(detail::find_split_file(dir, "dev"),
                                        EssaySplit::Dev);
  corpus.test = detail::parse_conll_file(detail::find_split_file(dir, "test"),
                                         EssaySplit::Test);
  return corpus;
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

using Tokenizer = std::function<std::vector<std::string>(const std::string&)>;

struct ClassStats {
  long long count = 0;
  double percent = 0.0;  // fraction of the corpus, in [0,1]
  double mean_tokens = 0.0;
};

struct CorpusStats {
  ClassStats non_claim, claim, explicit_claim, implicit_claim, total;
  double mean_claim_phrase_tokens = 0.0;  // over tokenized explicit spans
  std::map<Topic, double> claim_rate_by_topic;
};

inline CorpusStats corpus_stats(const std::vector<TweetRecord>& records,
                                const Tokenizer& tokenizer = tokenize) {
  if (records.empty()) throw std::runtime_error("corpus_stats: empty corpus");
  CorpusStats s;
  long long phrase_count = 0;
  double phrase_tokens = 0.0;
  std::map<Topic, std::pair<long long, long long>> topic_counts;  // claim, all
  for (const auto& r : records) {
    double len = double(tokenizer(r.text).size());
    auto add = [&](ClassStats& cs) {
      cs.count += 1;
      cs.mean_tokens += len;
    };
    add(s.total);
    if (r.label == Label3::NonClaim) {
      add(s.non_claim);
    } else {
      add(s.claim);
      if (r.label == Label3::ExplicitClaim) {
        add(s.explicit_claim);
        if (r.claim_span) {
          std::string phrase = r.text.substr(
              r.claim_span->begin, r.claim_span->end - r.claim_span->begin);
          phrase_tokens += double(tokenizer(phrase).size());
          ++phrase_count;
        }
      } else {
        add(s.implicit_claim);
      }
    }
    auto& tc = topic_counts[r.topic];
    if (r.label != Label3::NonClaim) ++tc.first;
    ++tc.second;
  }
  auto finish = [&](ClassStats& cs) {
    if (cs.count > 0) cs.mean_tokens /= double(cs.count);
    cs.percent = double(cs.count) / double(records.size());
  };
  finish(s.non_claim);
  finish(s.claim);
  finish(s.explicit_claim);
  finish(s.implicit_claim);
  finish(s.total);
  if (phrase_count > 0)
    s.mean_claim_phrase_tokens = phrase_tokens / double(phrase_count);
  for (auto& [topic, counts] : topic_counts) {
    s.claim_rate_by_topic[topic] =
        double(counts.first) / double(counts.second);
  }
  return s;
}

struct LengthClassCrosstab {
  long long short_non_claim = 0;  // length <= threshold
  long long short_claim = 0;
  long long long_non_claim = 0;  // length > threshold
  long long long_claim = 0;

  long long total() const {
    return short_non_claim + short_claim + long_non_claim + long_claim;
  }
};

inline LengthClassCrosstab length_class_crosstab(
    const std::vector<TweetRecord>& records, int threshold,
    const Tokenizer& tokenizer = tokenize) {
  if (threshold < 1)
    throw std::runtime_error("length_class_crosstab: threshold must be >= 1");
  LengthClassCrosstab ct;
  for (const auto& r : records) {
    bool is_short = tokenizer(r.text).size() <= size_t(threshold);
    bool is_claim = r.label != Label3::NonClaim;
    if (is_short) {
      (is_claim ? ct.short_claim : ct.short_non_claim) += 1;
    } else {
      (is_claim ? ct.long_claim : ct.long_non_claim) += 1;
    }
  }
  return ct;
}

// TSV report with one row per class: class, count, percent, mean length.
inline std::string stats_tsv(const CorpusStats& s) {
  auto fmt2 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  std::string out = "class\tcount\tpercent\tmean_tokens\n";
  auto row = [&](const std::string& name, const ClassStats& cs) {
    out += name + "\t" + std::to_string(cs.count) + "\t" +
           fmt2(cs.percent * 100.0) + "\t" + fmt2(cs.mean_tokens) + "\n";
  };
  row("non_claim", s.non_claim);
  row("claim", s.claim);
  row("explicit_claim", s.explicit_claim);
  out += "claim_phrase\t\t\t" + fmt2(s.mean_claim_phrase_tokens) + "\n";
  row("implicit_claim", s.implicit_claim);
  row("total", s.total);
  return out;
}

}  // namespace bioclaim
