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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bioclaim/corpus.hpp"
#include "support/synthetic.hpp"

using namespace bioclaim;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

static fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / "bioclaim_corpus_tests";
  fs::create_directories(p);
  return p;
}

static std::string write_file(const std::string& name,
                              const std::string& content) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << content;
  return p.string();
}

// ---------------------------------------------------------------------------
// Tweet JSONL ingestion
// ---------------------------------------------------------------------------

TEST_CASE("tweet records round trip through json") {
  TweetRecord r;
  r.id = "tw0001";
  r.text = "the mmr vaccine prevents measles outbreaks";
  r.topic = Topic::Measles;
  r.query_category = QueryCategory::Drug;
  r.label = Label3::ExplicitClaim;
  r.claim_span = CharSpan{8, 32};
  TweetRecord back = tweet_from_json(tweet_to_json(r));
  CHECK(back.id == r.id);
  CHECK(back.text == r.text);
  CHECK(back.topic == r.topic);
  CHECK(back.query_category == r.query_category);
  CHECK(back.label == r.label);
  REQUIRE(back.claim_span.has_value());
  CHECK(back.claim_span->begin == 8);
  CHECK(back.claim_span->end == 32);
  CHECK(!back.inferred_claim.has_value());

  TweetRecord imp;
  imp.id = "tw0002";
  imp.text = "everyone knows what happened after the shots";
  imp.topic = Topic::Covid19;
  imp.query_category = QueryCategory::TopicalHashtag;
  imp.label = Label3::ImplicitClaim;
  imp.inferred_claim = "vaccines cause harm";
  TweetRecord back2 = tweet_from_json(tweet_to_json(imp));
  CHECK(back2.label == Label3::ImplicitClaim);
  REQUIRE(back2.inferred_claim.has_value());
  CHECK(*back2.inferred_claim == "vaccines cause harm");
}

TEST_CASE("tweet json validation enforces the label contract") {
  auto base = [] {
    nlohmann::json j;
    j["id"] = "t1";
    j["text"] = "ten bytes!";
    j["topic"] = "covid19";
    j["query_category"] = "drug";
    j["label"] = "non_claim";
    return j;
  };
  CHECK_NOTHROW(tweet_from_json(base()));

  auto j = base();
  j.erase("id");
  CHECK_THROWS_WITH(tweet_from_json(j), ContainsSubstring("id"));
  j = base();
  j["label"] = "bogus";
  CHECK_THROWS(tweet_from_json(j));
  j = base();
  j["topic"] = "ebola";
  CHECK_THROWS(tweet_from_json(j));
  // span on a non-explicit record
  j = base();
  j["claim_span"] = {0, 4};
  CHECK_THROWS_WITH(tweet_from_json(j), ContainsSubstring("claim_span"));
  // explicit without a span
  j = base();
  j["label"] = "explicit";
  CHECK_THROWS_WITH(tweet_from_json(j), ContainsSubstring("claim_span"));
  // span outside the text
  j = base();
  j["label"] = "explicit";
  j["claim_span"] = {0, 11};
  CHECK_THROWS(tweet_from_json(j));
  // empty span
  j = base();
  j["label"] = "explicit";
  j["claim_span"] = {4, 4};
  CHECK_THROWS(tweet_from_json(j));
  // negative span element
  j = base();
  j["label"] = "explicit";
  j["claim_span"] = {-1, 4};
  CHECK_THROWS(tweet_from_json(j));
  // inferred claim outside implicit
  j = base();
  j["inferred_claim"] = "x";
  CHECK_THROWS_WITH(tweet_from_json(j), ContainsSubstring("inferred_claim"));
  // boundary span [0, text size) is legal
  j = base();
  j["label"] = "explicit";
  j["claim_span"] = {0, 10};
  CHECK_NOTHROW(tweet_from_json(j));
}

TEST_CASE("load_tweet_corpus reports the offending line") {
  auto good = tweet_to_json([] {
    TweetRecord r;
    r.id = "a";
    r.text = "x y";
    r.label = Label3::NonClaim;
    return r;
  }()).dump();
  auto path = write_file("bad_line.jsonl",
                         good + "\n{\"id\": \"b\"}\n");
  CHECK_THROWS_WITH(load_tweet_corpus(path), ContainsSubstring(":2:"));

  auto dup = write_file("dup_id.jsonl", good + "\n" + good + "\n");
  CHECK_THROWS_WITH(load_tweet_corpus(dup), ContainsSubstring("duplicate id"));

  CHECK_THROWS(load_tweet_corpus((scratch_dir() / "nope.jsonl").string()));
}

TEST_CASE("load_tweet_corpus skips blank lines and keeps order") {
  TweetRecord r1, r2;
  r1.id = "a";
  r1.text = "one";
  r2.id = "b";
  r2.text = "two";
  auto path = write_file("ok.jsonl", tweet_to_json(r1).dump() + "\n\n" +
                                         tweet_to_json(r2).dump() + "\n");
  auto records = load_tweet_corpus(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "a");
  CHECK(records[1].id == "b");
}

// ---------------------------------------------------------------------------
// Acquisition filtering and sampling
// ---------------------------------------------------------------------------

TEST_CASE("contains_url flags protocols and www tokens") {
  CHECK(contains_url("read http://example.org now"));
  CHECK(contains_url("https://x"));
  CHECK(contains_url("see www.example.org please"));
  CHECK(contains_url("www.start of text"));
  CHECK(contains_url("wwwx.org or www. alone"));  // bare "www." token
  CHECK(!contains_url("awww.cute kitten"));       // not token-initial
  CHECK(!contains_url("wwwx.org has no dot after www"));
  CHECK(!contains_url("no links here"));
  CHECK(!contains_url(""));
}

TEST_CASE("filter_acquisition drops retweets, urls, and duplicate ids") {
  auto raw = synth::make_raw_dump(3, 3);
  auto kept = filter_acquisition(raw);
  // 16 cells, 3 clean records each
  REQUIRE(kept.size() == 48);
  std::set<std::string> ids;
  for (const auto& r : kept) {
    CHECK(!r.is_retweet);
    CHECK(!contains_url(r.text));
    CHECK(ids.insert(r.id).second);
  }
  // keeps input order
  for (size_t i = 1; i < kept.size(); ++i) {
    int a = std::stoi(kept[i - 1].id.substr(3));
    int b = std::stoi(kept[i].id.substr(3));
    CHECK(a < b);
  }
  // idempotent
  auto twice = filter_acquisition(kept);
  REQUIRE(twice.size() == kept.size());
  for (size_t i = 0; i < kept.size(); ++i) CHECK(twice[i].id == kept[i].id);
}

TEST_CASE("stratified_sample draws per-cell without replacement") {
  auto filtered = filter_acquisition(synth::make_raw_dump(5, 5));
  auto sample = stratified_sample(filtered, 3, 99);
  REQUIRE(sample.size() == 48);
  std::map<std::pair<int, int>, std::vector<std::string>> cells;
  for (const auto& r : sample)
    cells[{int(r.topic), int(r.query_category)}].push_back(r.id);
  REQUIRE(cells.size() == 16);
  for (auto& [key, ids] : cells) {
    CHECK(ids.size() == 3);
    // unique within the cell and in input order (ascending serials)
    for (size_t i = 1; i < ids.size(); ++i)
      CHECK(std::stoi(ids[i - 1].substr(3)) < std::stoi(ids[i].substr(3)));
  }
  // deterministic per seed
  auto again = stratified_sample(filtered, 3, 99);
  REQUIRE(again.size() == sample.size());
  for (size_t i = 0; i < sample.size(); ++i)
    CHECK(again[i].id == sample[i].id);
}

TEST_CASE("stratified_sample with the exact cell size returns every record") {
  auto filtered = filter_acquisition(synth::make_raw_dump(7, 2));
  auto sample = stratified_sample(filtered, 2, 1);
  REQUIRE(sample.size() == filtered.size());
  // cells are emitted in enum order; records keep input order inside a cell
  std::vector<std::string> expect;
  for (const auto& r : filtered) expect.push_back(r.id);
  std::vector<std::string> got;
  for (const auto& r : sample) got.push_back(r.id);
  std::sort(expect.begin(), expect.end());
  std::sort(got.begin(), got.end());
  CHECK(got == expect);
}

TEST_CASE("stratified_sample names the undersized cell") {
  auto filtered = filter_acquisition(synth::make_raw_dump(11, 2));
  CHECK_THROWS_WITH(stratified_sample(filtered, 3, 1),
                    ContainsSubstring("covid19"));
}

TEST_CASE("raw dump json round trip and load") {
  auto raw = synth::make_raw_dump(13, 2);
  auto path = (scratch_dir() / "raw.jsonl").string();
  synth::write_raw_jsonl(path, raw);
  auto back = load_raw_dump(path);
  REQUIRE(back.size() == raw.size());
  CHECK(back[0].id == raw[0].id);
  CHECK(back[0].is_retweet == raw[0].is_retweet);
  CHECK(back.back().text == raw.back().text);

  auto bad = write_file("raw_bad.jsonl", "{\"id\": \"x\", \"text\": \"y\"}\n");
  CHECK_THROWS_WITH(load_raw_dump(bad), ContainsSubstring("is_retweet"));
}

// ---------------------------------------------------------------------------
// Corpus statistics on the synthetic replica
// ---------------------------------------------------------------------------

TEST_CASE("replica corpus reproduces the reference statistics") {
  auto records = synth::table3_replica();
  REQUIRE(records.size() == 1200);
  CorpusStats s = corpus_stats(records);

  CHECK(s.non_claim.count == 663);
  CHECK(s.claim.count == 537);
  CHECK(s.explicit_claim.count == 370);
  CHECK(s.implicit_claim.count == 167);
  CHECK(s.total.count == 1200);

  CHECK_THAT(s.non_claim.percent, WithinAbs(0.5525, 1e-12));
  CHECK_THAT(s.claim.percent, WithinAbs(0.4475, 1e-12));
  CHECK_THAT(s.explicit_claim.percent, WithinAbs(370.0 / 1200.0, 1e-12));
  CHECK_THAT(s.implicit_claim.percent, WithinAbs(167.0 / 1200.0, 1e-12));

  CHECK_THAT(s.non_claim.mean_tokens, WithinAbs(20261.0 / 663.0, 1e-9));
  CHECK_THAT(s.claim.mean_tokens, WithinAbs(21418.0 / 537.0, 1e-9));
  CHECK_THAT(s.explicit_claim.mean_tokens, WithinAbs(14758.0 / 370.0, 1e-9));
  CHECK_THAT(s.implicit_claim.mean_tokens, WithinAbs(6660.0 / 167.0, 1e-9));
  CHECK_THAT(s.total.mean_tokens, WithinAbs(41679.0 / 1200.0, 1e-9));
  CHECK_THAT(s.mean_claim_phrase_tokens, WithinAbs(6508.0 / 370.0, 1e-9));

  REQUIRE(s.claim_rate_by_topic.size() == 4);
  CHECK_THAT(s.claim_rate_by_topic.at(Topic::Covid19),
             WithinAbs(0.49, 1e-12));
  CHECK_THAT(s.claim_rate_by_topic.at(Topic::Measles),
             WithinAbs(0.61, 1e-12));
  CHECK_THAT(s.claim_rate_by_topic.at(Topic::CysticFibrosis),
             WithinAbs(0.40, 1e-12));
  CHECK_THAT(s.claim_rate_by_topic.at(Topic::Depression),
             WithinAbs(0.29, 1e-12));
}

TEST_CASE("replica statistics render with the published two-decimal values") {
  auto records = synth::table3_replica();
  std::string tsv = stats_tsv(corpus_stats(records));
  CHECK_THAT(tsv, ContainsSubstring("non_claim\t663\t55.25\t30.56\n"));
  CHECK_THAT(tsv, ContainsSubstring("claim\t537\t44.75\t39.88\n"));
  CHECK_THAT(tsv, ContainsSubstring("explicit_claim\t370\t30.83\t39.89\n"));
  CHECK_THAT(tsv, ContainsSubstring("claim_phrase\t\t\t17.59\n"));
  CHECK_THAT(tsv, ContainsSubstring("implicit_claim\t167\t13.92\t39.88\n"));
  CHECK_THAT(tsv, ContainsSubstring("total\t1200\t100.00\t34.73\n"));
}

TEST_CASE("replica length/class crosstab at the 30-token threshold") {
  auto records = synth::table3_replica();
  LengthClassCrosstab ct = length_class_crosstab(records, 30);
  CHECK(ct.short_non_claim == 453);
  CHECK(ct.short_claim == 243);
  CHECK(ct.long_non_claim == 210);
  CHECK(ct.long_claim == 294);
  CHECK(ct.total() == 1200);
  CHECK_THROWS(length_class_crosstab(records, 0));
}

TEST_CASE("replica per-cell design holds and spans are consistent") {
  auto records = synth::table3_replica();
  std::map<std::pair<int, int>, int> cells;
  std::set<std::string> ids;
  for (const auto& r : records) {
    CHECK(ids.insert(r.id).second);
    ++cells[{int(r.topic), int(r.query_category)}];
    if (r.label == Label3::ExplicitClaim) {
      REQUIRE(r.claim_span.has_value());
      CHECK(r.claim_span->begin < r.claim_span->end);
      CHECK(r.claim_span->end <= r.text.size());
    } else {
      CHECK(!r.claim_span.has_value());
    }
    if (r.inferred_claim.has_value())
      CHECK(r.label == Label3::ImplicitClaim);
  }
  REQUIRE(cells.size() == 16);
  for (auto& [key, count] : cells) CHECK(count == 75);
}

TEST_CASE("replica corpus round trips through jsonl") {
  auto records = synth::table3_replica();
  auto path = (scratch_dir() / "replica.jsonl").string();
  synth::write_tweet_jsonl(path, records);
  auto back = load_tweet_corpus(path);
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < records.size(); i += 97) {
    CHECK(back[i].id == records[i].id);
    CHECK(back[i].text == records[i].text);
    CHECK(back[i].label == records[i].label);
    CHECK(back[i].claim_span.has_value() ==
          records[i].claim_span.has_value());
  }
}

TEST_CASE("corpus_stats rejects an empty corpus") {
  CHECK_THROWS(corpus_stats({}));
}

TEST_CASE("corpus_stats accepts a custom tokenizer") {
  TweetRecord r;
  r.id = "a";
  r.text = "one two three";
  std::vector<TweetRecord> records = {r};
  auto chars = [](const std::string& text) {
    return std::vector<std::string>(text.size(), "c");
  };
  CorpusStats s = corpus_stats(records, chars);
  CHECK_THAT(s.total.mean_tokens, WithinAbs(13.0, 1e-12));
}

// ---------------------------------------------------------------------------
// Essay CONLL ingestion
// ---------------------------------------------------------------------------

TEST_CASE("essay conll parsing: paragraphs, tags, and claim types") {
  fs::path dir = scratch_dir() / "conll_small";
  fs::create_directories(dir);
  std::ofstream train(dir / "train.conll");
  train << "We\tO\nshould\tB-Claim:For\nact\tI-Claim:For\nnow\tO\n"
        << "\n"
        << "Because\tB-Premise\nit\tI-Premise\nhelps\tI-Premise\n"
        << "\n"
        << "Key\tB-MajorClaim\npoint\tI-MajorClaim\n";
  train.close();
  std::ofstream dev(dir / "dev.conll");
  dev << "Filler\tO\r\nwords\tO\r\n";  // CRLF endings
  dev.close();
  std::ofstream test(dir / "test.conll");
  test << "More\tO\nfiller\tO\n\n\nLast\tO\n";  // double blank line
  test.close();

  EssayCorpus corpus = load_essay_conll(dir.string());
  REQUIRE(corpus.train.size() == 3);
  CHECK(corpus.train[0].claim);       // Claim with a stance suffix
  CHECK(!corpus.train[1].claim);      // Premise is not a claim
  CHECK(corpus.train[2].claim);       // MajorClaim counts
  CHECK(corpus.train[0].tokens ==
        std::vector<std::string>{"We", "should", "act", "now"});
  CHECK(corpus.train[0].essay_id == "train");
  CHECK(corpus.train[1].paragraph_index == 1);
  REQUIRE(corpus.dev.size() == 1);
  CHECK(corpus.dev[0].tokens == std::vector<std::string>{"Filler", "words"});
  REQUIRE(corpus.test.size() == 2);
  CHECK(corpus.test[0].split == EssaySplit::Test);
}

TEST_CASE("essay conll requires consistent columns per file") {
  fs::path dir = scratch_dir() / "conll_cols";
  fs::create_directories(dir);
  std::ofstream(dir / "train.conll") << "a\tx\tO\nb\tO\n";
  std::ofstream(dir / "dev.conll") << "a\tO\n";
  std::ofstream(dir / "test.conll") << "a\tO\n";
  CHECK_THROWS_WITH(load_essay_conll(dir.string()), ContainsSubstring(":2:"));
}

TEST_CASE("essay conll requires one file per split") {
  fs::path dir = scratch_dir() / "conll_missing";
  fs::create_directories(dir);
  std::ofstream(dir / "train.conll") << "a\tO\n";
  std::ofstream(dir / "dev.conll") << "a\tO\n";
  CHECK_THROWS_WITH(load_essay_conll(dir.string()), ContainsSubstring("test"));

  fs::path dir2 = scratch_dir() / "conll_dup";
  fs::create_directories(dir2);
  std::ofstream(dir2 / "train.conll") << "a\tO\n";
  std::ofstream(dir2 / "train_extra.conll") << "a\tO\n";
  std::ofstream(dir2 / "dev.conll") << "a\tO\n";
  std::ofstream(dir2 / "test.conll") << "a\tO\n";
  CHECK_THROWS_WITH(load_essay_conll(dir2.string()),
                    ContainsSubstring("multiple"));
}

TEST_CASE("essay replica has the reference split sizes") {
  fs::path dir = scratch_dir() / "essay_replica";
  synth::write_essay_replica(dir.string());
  EssayCorpus corpus = load_essay_conll(dir.string());
  CHECK(corpus.train.size() == 1587);
  CHECK(corpus.dev.size() == 199);
  CHECK(corpus.test.size() == 449);
  // majority of paragraphs argue a claim
  size_t claims = 0;
  for (const auto& p : corpus.train)
    if (p.claim) ++claims;
  CHECK(double(claims) / double(corpus.train.size()) > 0.5);
  // loader's claim flags equal the generator's
  EssayCorpus mem = synth::essay_replica();
  REQUIRE(mem.train.size() == corpus.train.size());
  for (size_t i = 0; i < mem.train.size(); i += 53)
    CHECK(mem.train[i].claim == corpus.train[i].claim);
}
