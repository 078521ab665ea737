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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bioclaim/bioclaim.hpp"

namespace {

using namespace bioclaim;

void apply_overrides(ExperimentConfig& cfg, const std::string& embeddings,
                     long long embedding_limit, const std::string& output_dir,
                     long long seed) {
  if (!embeddings.empty()) cfg.embeddings = embeddings;
  if (embedding_limit >= 0) cfg.embedding_limit = size_t(embedding_limit);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (seed >= 0) cfg.seed = uint64_t(seed);
}

int cmd_run(const std::string& config_path, const std::string& embeddings,
            long long embedding_limit, const std::string& output_dir,
            long long seed) {
  ExperimentConfig cfg = load_config(config_path);
  apply_overrides(cfg, embeddings, embedding_limit, output_dir, seed);
  GridResult result = run_grid(cfg);
  std::cout << result.report_tsv;
  return 0;
}

int cmd_cross_domain(const std::string& config_path,
                     const std::string& embeddings, long long embedding_limit,
                     const std::string& output_dir, long long seed) {
  ExperimentConfig cfg = load_config(config_path);
  apply_overrides(cfg, embeddings, embedding_limit, output_dir, seed);
  CrossDomainResult result = run_cross_domain(cfg);
  std::cout << result.report_tsv;
  return 0;
}

int cmd_stats(const std::string& corpus_path, int length_threshold) {
  auto records = load_tweet_corpus(corpus_path);
  CorpusStats stats = corpus_stats(records);
  std::cout << stats_tsv(stats);
  std::cout << "\ntopic\tclaim_rate\n";
  for (const auto& [topic, rate] : stats.claim_rate_by_topic) {
    std::printf("%s\t%.2f\n", to_string(topic), rate);
  }
  if (length_threshold > 0) {
    auto ct = length_class_crosstab(records, length_threshold);
    std::cout << "\nlength\tnon_claim\tclaim\n";
    std::cout << "<=" << length_threshold << "\t" << ct.short_non_claim
              << "\t" << ct.short_claim << "\n";
    std::cout << ">" << length_threshold << "\t" << ct.long_non_claim << "\t"
              << ct.long_claim << "\n";
  }
  return 0;
}

int cmd_agreement(const std::string& path_a, const std::string& path_b,
                  const std::string& level) {
  auto a = load_tweet_corpus(path_a);
  auto b = load_tweet_corpus(path_b);
  std::map<std::string, const TweetRecord*> b_by_id;
  for (const auto& r : b) b_by_id[r.id] = &r;

  AgreementResult res;
  if (level == "doc2" || level == "doc3") {
    std::vector<std::string> labels_a, labels_b;
    for (const auto& ra : a) {
      auto it = b_by_id.find(ra.id);
      if (it == b_by_id.end())
        throw std::runtime_error("agreement: id '" + ra.id + "' missing from " +
                                 path_b);
      if (level == "doc2") {
        labels_a.push_back(to_string(to_binary(ra.label)));
        labels_b.push_back(to_string(to_binary(it->second->label)));
      } else {
        labels_a.push_back(to_string(ra.label));
        labels_b.push_back(to_string(it->second->label));
      }
    }
    res = cohen_kappa(labels_a, labels_b);
  } else if (level == "span") {
    std::vector<std::vector<CharSpan>> tokens;
    std::vector<std::vector<CharSpan>> spans_a, spans_b;
    for (const auto& ra : a) {
      auto it = b_by_id.find(ra.id);
      if (it == b_by_id.end())
        throw std::runtime_error("agreement: id '" + ra.id + "' missing from " +
                                 path_b);
      const TweetRecord& rb = *it->second;
      if (ra.text != rb.text)
        throw std::runtime_error("agreement: text mismatch for id '" + ra.id +
                                 "'");
      std::vector<CharSpan> doc_tokens;
      for (const auto& t : tokenize_with_offsets(ra.text))
        doc_tokens.push_back({t.begin, t.end});
      tokens.push_back(std::move(doc_tokens));
      spans_a.push_back(ra.claim_span
                            ? std::vector<CharSpan>{*ra.claim_span}
                            : std::vector<CharSpan>{});
      spans_b.push_back(rb.claim_span
                            ? std::vector<CharSpan>{*rb.claim_span}
                            : std::vector<CharSpan>{});
    }
    res = token_span_kappa(tokens, spans_a, spans_b);
  } else {
    throw std::runtime_error("agreement: unknown level '" + level +
                             "' (use doc2, doc3, or span)");
  }
  std::printf("kappa\t%.4f\n", res.kappa);
  std::printf("p_o\t%.4f\n", res.p_o);
  std::printf("p_e\t%.4f\n", res.p_e);
  std::printf("n_items\t%zu\n", res.n_items);
  return 0;
}

int cmd_sample(const std::string& raw_path, long long per_cell,
               long long seed, const std::string& out_path) {
  auto raw = load_raw_dump(raw_path);
  auto filtered = filter_acquisition(raw);
  auto sampled = stratified_sample(filtered, size_t(per_cell), uint64_t(seed));
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  for (const auto& r : sampled) *out << raw_to_json(r).dump() << "\n";
  return 0;
}

int cmd_tokenize(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(normalize_mentions(line));
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) std::cout << '\t';
      std::cout << tokens[i];
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biomedical claim detection toolkit"};
  app.require_subcommand(1);

  std::string config_path, embeddings, output_dir;
  long long embedding_limit = -1, seed_override = -1;

  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (json)")
        ->required();
    cmd->add_option("--embeddings", embeddings,
                    "override the config's embeddings path");
    cmd->add_option("--embedding-limit", embedding_limit,
                    "override the config's vocabulary cap (0 = all)");
    cmd->add_option("--output-dir", output_dir,
                    "override the config's output directory");
    cmd->add_option("--seed", seed_override, "override the config's seed");
  };

  CLI::App* run = app.add_subcommand("run", "run the in-domain task grid");
  add_run_options(run);

  CLI::App* xd = app.add_subcommand("cross-domain",
                                    "run the cross-domain transfer matrix");
  add_run_options(xd);

  std::string corpus_path;
  int length_threshold = 0;
  CLI::App* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--corpus", corpus_path, "annotated corpus (jsonl)")
      ->required();
  stats->add_option("--length-threshold", length_threshold,
                    "also print a length/class crosstab at this token count");

  std::string agree_a, agree_b, agree_level = "doc3";
  CLI::App* agree =
      app.add_subcommand("agreement", "inter-annotator agreement");
  agree->add_option("--a", agree_a, "first annotator's corpus (jsonl)")
      ->required();
  agree->add_option("--b", agree_b, "second annotator's corpus (jsonl)")
      ->required();
  agree->add_option("--level", agree_level,
                    "doc2 (claim/non-claim), doc3 (three-way), or span");

  std::string raw_path, sample_out;
  long long per_cell = 0, sample_seed = 13;
  CLI::App* sample =
      app.add_subcommand("sample", "filter a raw dump and draw a "
                                   "stratified sample");
  sample->add_option("--raw", raw_path, "raw acquisition dump (jsonl)")
      ->required();
  sample->add_option("--per-cell", per_cell,
                     "records per (topic, query category) cell")
      ->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_seed, "sampling seed");
  sample->add_option("--out", sample_out, "output path (default stdout)");

  std::string tokenize_in;
  CLI::App* tok = app.add_subcommand("tokenize",
                                     "tokenize text, one line per input line");
  tok->add_option("--in", tokenize_in, "text file to tokenize")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, embeddings, embedding_limit, output_dir,
                     seed_override);
    if (xd->parsed())
      return cmd_cross_domain(config_path, embeddings, embedding_limit,
                              output_dir, seed_override);
    if (stats->parsed()) return cmd_stats(corpus_path, length_threshold);
    if (agree->parsed()) return cmd_agreement(agree_a, agree_b, agree_level);
    if (sample->parsed())
      return cmd_sample(raw_path, per_cell, sample_seed, sample_out);
    if (tok->parsed()) return cmd_tokenize(tokenize_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
