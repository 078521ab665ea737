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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bioclaim/corpus.hpp"
#include "bioclaim/embeddings.hpp"
#include "bioclaim/eval.hpp"
#include "bioclaim/preprocess.hpp"
#include "bioclaim/rng.hpp"
#include "bioclaim/tasks.hpp"
#include "bioclaim/types.hpp"

namespace bioclaim {

struct SplitSizes {
  size_t train = 0, val = 0, test = 0;
};

struct LgSettings {
  double learning_rate = 0.1;
  int epochs = 500;
  double tolerance = 1e-6;
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1};
};

struct ExperimentConfig {
  std::string tweet_corpus;
  std::string essay_dir;  // cross-domain runs only
  std::string embeddings;
  size_t embedding_limit = 0;  // 0 = load the whole vocabulary
  uint64_t seed = 13;
  SplitSizes split;
  std::vector<TaskKind> tasks = {TaskKind::Binary, TaskKind::Multiclass,
                                 TaskKind::Pipeline};
  std::vector<ModelKind> models = {ModelKind::NB, ModelKind::LG};
  LgSettings lg;
  std::string output_dir;  // empty = no files written
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key))
      throw std::runtime_error("config: unknown key '" + key + "' in " +
                               where);
  }
}

inline bool is_nonneg_int(const nlohmann::json& v) {
  return v.is_number_integer() &&
         (v.is_number_unsigned() || v.get<long long>() >= 0);
}

}  // namespace detail

inline SplitSizes split_sizes_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"train", "val", "test"}, "split");
  SplitSizes s;
  for (const char* key : {"train", "val", "test"}) {
    if (!j.contains(key) || !detail::is_nonneg_int(j[key]))
      throw std::runtime_error(
          std::string("config: split requires non-negative integer '") + key +
          "'");
  }
  s.train = j["train"].get<size_t>();
  s.val = j["val"].get<size_t>();
  s.test = j["test"].get<size_t>();
  return s;
}

inline LgSettings lg_settings_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j, {"learning_rate", "epochs", "tolerance", "lambda_grid"}, "lg");
  LgSettings s;
  if (j.contains("learning_rate")) s.learning_rate = j["learning_rate"];
  if (j.contains("epochs")) s.epochs = j["epochs"];
  if (j.contains("tolerance")) s.tolerance = j["tolerance"];
  if (j.contains("lambda_grid")) {
    s.lambda_grid = j["lambda_grid"].get<std::vector<double>>();
    if (s.lambda_grid.empty())
      throw std::runtime_error("config: lg.lambda_grid must not be empty");
  }
  if (s.learning_rate <= 0.0)
    throw std::runtime_error("config: lg.learning_rate must be positive");
  if (s.epochs < 1) throw std::runtime_error("config: lg.epochs must be >= 1");
  return s;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j,
      {"tweet_corpus", "essay_dir", "embeddings", "embedding_limit", "seed",
       "split", "tasks", "models", "lg", "output_dir"},
      "top level");
  ExperimentConfig cfg;
  if (j.contains("tweet_corpus")) cfg.tweet_corpus = j["tweet_corpus"];
  if (j.contains("essay_dir")) cfg.essay_dir = j["essay_dir"];
  if (j.contains("embeddings")) cfg.embeddings = j["embeddings"];
  if (j.contains("embedding_limit")) {
    if (!detail::is_nonneg_int(j["embedding_limit"]))
      throw std::runtime_error(
          "config: embedding_limit must be a non-negative integer");
    cfg.embedding_limit = j["embedding_limit"].get<size_t>();
  }
  if (j.contains("seed")) {
    if (!detail::is_nonneg_int(j["seed"]))
      throw std::runtime_error("config: seed must be a non-negative integer");
    cfg.seed = j["seed"].get<uint64_t>();
  }
  if (j.contains("split")) cfg.split = split_sizes_from_json(j["split"]);
  if (j.contains("tasks")) {
    cfg.tasks.clear();
    for (const auto& t : j["tasks"])
      cfg.tasks.push_back(task_from_string(t.get<std::string>()));
    if (cfg.tasks.empty())
      throw std::runtime_error("config: tasks must not be empty");
  }
  if (j.contains("models")) {
    cfg.models.clear();
    for (const auto& m : j["models"])
      cfg.models.push_back(model_from_string(m.get<std::string>()));
    if (cfg.models.empty())
      throw std::runtime_error("config: models must not be empty");
  }
  if (j.contains("lg")) cfg.lg = lg_settings_from_json(j["lg"]);
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"];
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("load_config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["tweet_corpus"] = cfg.tweet_corpus;
  j["essay_dir"] = cfg.essay_dir;
  j["embeddings"] = cfg.embeddings;
  j["embedding_limit"] = cfg.embedding_limit;
  j["seed"] = cfg.seed;
  j["split"] = {{"train", cfg.split.train},
                {"val", cfg.split.val},
                {"test", cfg.split.test}};
  j["tasks"] = nlohmann::ordered_json::array();
  for (auto t : cfg.tasks) j["tasks"].push_back(to_string(t));
  j["models"] = nlohmann::ordered_json::array();
  for (auto m : cfg.models) j["models"].push_back(to_string(m));
  j["lg"] = {{"learning_rate", cfg.lg.learning_rate},
             {"epochs", cfg.lg.epochs},
             {"tolerance", cfg.lg.tolerance},
             {"lambda_grid", cfg.lg.lambda_grid}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

// ---------------------------------------------------------------------------
// Splitting and embedding
// ---------------------------------------------------------------------------

template <typename T>
struct ThreeWaySplit {
  std::vector<T> train, val, test;
};

// Seeded shuffle, then contiguous train/val/test slices. Sizes must add up
// to the input size exactly.
template <typename T>
ThreeWaySplit<T> split_three(const std::vector<T>& items, SplitSizes sizes,
                             uint64_t seed) {
  if (sizes.train + sizes.val + sizes.test != items.size())
    throw std::runtime_error(
        "split_three: sizes " + std::to_string(sizes.train) + "+" +
        std::to_string(sizes.val) + "+" + std::to_string(sizes.test) +
        " != corpus size " + std::to_string(items.size()));
  std::vector<T> shuffled = items;
  Rng rng(seed);
  rng.shuffle(shuffled);
  ThreeWaySplit<T> out;
  out.train.assign(shuffled.begin(), shuffled.begin() + sizes.train);
  out.val.assign(shuffled.begin() + sizes.train,
                 shuffled.begin() + sizes.train + sizes.val);
  out.test.assign(shuffled.begin() + sizes.train + sizes.val, shuffled.end());
  return out;
}

// Mention normalization, tokenization, then embedding average.
inline DocVector embed_text(const std::string& text,
                            const EmbeddingTable& table) {
  return embed_document(tokenize(normalize_mentions(text)), table);
}

inline std::vector<LabeledDoc> embed_tweets(
    const std::vector<TweetRecord>& records, const EmbeddingTable& table) {
  std::vector<LabeledDoc> docs;
  docs.reserve(records.size());
  for (const auto& r : records)
    docs.push_back({r.id, embed_text(r.text, table), r.label});
  return docs;
}

// Essay paragraphs go through the same text pipeline as tweets: tokens are
// joined with single spaces and retokenized. Claim paragraphs borrow the
// explicit slot of Label3; essay runs are binary only.
inline std::vector<LabeledDoc> embed_essays(
    const std::vector<EssayParagraph>& paragraphs,
    const EmbeddingTable& table) {
  std::vector<LabeledDoc> docs;
  docs.reserve(paragraphs.size());
  for (const auto& p : paragraphs) {
    std::string text;
    for (size_t i = 0; i < p.tokens.size(); ++i) {
      if (i > 0) text += ' ';
      text += p.tokens[i];
    }
    std::string id = std::string("essay:") + to_string(p.split) + ":" +
                     p.essay_id + ":" + std::to_string(p.paragraph_index);
    docs.push_back({id, embed_text(text, table),
                    p.claim ? Label3::ExplicitClaim : Label3::NonClaim});
  }
  return docs;
}

// ---------------------------------------------------------------------------
// In-domain grid
// ---------------------------------------------------------------------------

struct GridCell {
  TaskKind task = TaskKind::Binary;
  ModelKind model = ModelKind::LG;
  PredictionSet predictions;  // native label space of the task
  // per-class metrics keyed by machine label
  std::map<std::string, ClassMetrics> binary_eval;
  std::map<std::string, ClassMetrics> multiclass_eval;  // non-binary tasks
};

struct GridResult {
  ExperimentConfig config;
  std::vector<GridCell> cells;
  std::string report_tsv;
  nlohmann::ordered_json report_json;
};

namespace detail {

inline std::map<std::string, ClassMetrics> eval_against(
    const PredictionSet& s, const std::vector<std::string>& classes) {
  ConfusionMatrix cm = confusion(s.gold_names(), s.pred_names(), classes);
  std::vector<ClassMetrics> per_class = prf_per_class(cm);
  std::map<std::string, ClassMetrics> out;
  for (size_t c = 0; c < cm.classes.size(); ++c)
    out[cm.classes[c]] = per_class[c];
  return out;
}

inline nlohmann::ordered_json metrics_to_json(
    const std::map<std::string, ClassMetrics>& by_class) {
  nlohmann::ordered_json j;
  for (const auto& [name, m] : by_class) {
    j[name] = {{"precision", m.precision},
               {"recall", m.recall},
               {"f1", m.f1},
               {"support", m.support}};
  }
  return j;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << content;
}

inline TaskConfig task_config_for(const ExperimentConfig& cfg, TaskKind task,
                                  ModelKind model) {
  TaskConfig tc;
  tc.model = model;
  tc.train.learning_rate = cfg.lg.learning_rate;
  tc.train.epochs = cfg.lg.epochs;
  tc.train.tolerance = cfg.lg.tolerance;
  tc.lambda_grid = cfg.lg.lambda_grid;
  // Substreams: 0 = corpus shuffle, 1 = binary oversampling (shared by the
  // pipeline's first stage), 2 = multiclass, 3 = pipeline stage 2.
  tc.seed = Rng::substream(cfg.seed,
                           task == TaskKind::Multiclass ? 2 : 1);
  tc.stage2_seed = Rng::substream(cfg.seed, 3);
  return tc;
}

}  // namespace detail

inline const std::vector<std::string> kBinaryClasses = {"non_claim", "claim"};
inline const std::vector<std::string> kMulticlassClasses = {
    "non_claim", "explicit", "implicit"};

// Runs every configured (task, model) pair on one corpus split and collects
// the per-class scores: binary-mode evaluation for every task (non-binary
// predictions are collapsed first) plus native three-way evaluation for the
// multiclass and pipeline tasks.
inline GridResult run_grid_on_docs(const ExperimentConfig& cfg,
                                   const std::vector<LabeledDoc>& train,
                                   const std::vector<LabeledDoc>& val,
                                   const std::vector<LabeledDoc>& test) {
  GridResult result;
  result.config = cfg;
  for (TaskKind task : cfg.tasks) {
    for (ModelKind model : cfg.models) {
      TaskConfig tc = detail::task_config_for(cfg, task, model);
      GridCell cell;
      cell.task = task;
      cell.model = model;
      switch (task) {
        case TaskKind::Binary:
          cell.predictions = run_binary(train, val, test, tc);
          break;
        case TaskKind::Multiclass:
          cell.predictions = run_multiclass(train, val, test, tc);
          break;
        case TaskKind::Pipeline:
          cell.predictions = run_pipeline(train, val, test, tc);
          break;
      }
      if (task == TaskKind::Binary) {
        cell.binary_eval = detail::eval_against(cell.predictions,
                                                kBinaryClasses);
      } else {
        cell.binary_eval = detail::eval_against(
            collapse_to_binary(cell.predictions), kBinaryClasses);
        cell.multiclass_eval =
            detail::eval_against(cell.predictions, kMulticlassClasses);
      }
      result.cells.push_back(std::move(cell));
    }
  }

  // table rows mirror the published layout: claim / n-claim per binary
  // evaluation, n-claim / expl / impl per three-way evaluation
  std::vector<ReportRow> rows;
  auto cell_for = [&](TaskKind task, ModelKind model) -> const GridCell& {
    for (const auto& c : result.cells)
      if (c.task == task && c.model == model) return c;
    throw std::logic_error("missing grid cell");
  };
  static const std::vector<std::pair<std::string, std::string>> kBinaryRows = {
      {"claim", "claim"}, {"n-claim", "non_claim"}};
  static const std::vector<std::pair<std::string, std::string>>
      kMulticlassRows = {{"n-claim", "non_claim"},
                         {"expl", "explicit"},
                         {"impl", "implicit"}};
  std::vector<std::string> model_names;
  for (ModelKind m : cfg.models) model_names.push_back(to_string(m));
  for (TaskKind task : cfg.tasks) {
    for (const auto& [display, machine] : kBinaryRows) {
      for (ModelKind model : cfg.models) {
        const GridCell& c = cell_for(task, model);
        rows.push_back({"binary", to_string(task), display, to_string(model),
                        c.binary_eval.at(machine)});
      }
    }
    if (task == TaskKind::Binary) continue;
    for (const auto& [display, machine] : kMulticlassRows) {
      for (ModelKind model : cfg.models) {
        const GridCell& c = cell_for(task, model);
        rows.push_back({"multiclass", to_string(task), display,
                        to_string(model), c.multiclass_eval.at(machine)});
      }
    }
  }
  result.report_tsv = report_table(rows, model_names);

  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : result.cells) {
    nlohmann::ordered_json cj;
    cj["task"] = to_string(c.task);
    cj["model"] = to_string(c.model);
    cj["lambdas"] = c.predictions.lambdas;
    cj["binary_eval"] = detail::metrics_to_json(c.binary_eval);
    if (!c.multiclass_eval.empty())
      cj["multiclass_eval"] = detail::metrics_to_json(c.multiclass_eval);
    j["cells"].push_back(std::move(cj));
  }
  result.report_json = std::move(j);

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    detail::write_text_file(fs::path(cfg.output_dir) / "report.tsv",
                            result.report_tsv);
    detail::write_text_file(fs::path(cfg.output_dir) / "report.json",
                            result.report_json.dump(2) + "\n");
    for (const auto& c : result.cells) {
      std::string name = std::string("predictions_") + to_string(c.task) +
                         "_" + to_string(c.model) + ".tsv";
      detail::write_text_file(fs::path(cfg.output_dir) / name,
                              predictions_tsv(c.predictions));
    }
  }
  return result;
}

inline GridResult run_grid(const ExperimentConfig& cfg) {
  if (cfg.tweet_corpus.empty())
    throw std::runtime_error("config: tweet_corpus is required");
  if (cfg.embeddings.empty())
    throw std::runtime_error("config: embeddings is required");
  if (cfg.split.train + cfg.split.val + cfg.split.test == 0)
    throw std::runtime_error("config: split sizes are required");
  auto records = load_tweet_corpus(cfg.tweet_corpus);
  auto table = load_vec(cfg.embeddings,
                        cfg.embedding_limit > 0
                            ? std::optional<size_t>(cfg.embedding_limit)
                            : std::nullopt);
  auto docs = embed_tweets(records, table);
  auto split = split_three(docs, cfg.split, Rng::substream(cfg.seed, 0));
  return run_grid_on_docs(cfg, split.train, split.val, split.test);
}

// ---------------------------------------------------------------------------
// Cross-domain matrix
// ---------------------------------------------------------------------------

struct CrossDomainCell {
  std::string train_on;  // tweets | essays | tweets+essays
  std::string eval_on;   // tweets | essays
  PredictionSet predictions;
  ClassMetrics claim;  // claim-class scores on the evaluation set
};

struct CrossDomainResult {
  ExperimentConfig config;
  std::vector<CrossDomainCell> cells;
  std::string report_tsv;
  nlohmann::ordered_json report_json;
};

// Binary LG transfer matrix: train on tweets, essays, or their
// concatenation (oversampled after concatenation), evaluate on the tweet
// and essay test sets. The tweets->tweets cell reproduces the in-domain
// binary LG run bit for bit.
inline CrossDomainResult run_cross_domain_on_docs(
    const ExperimentConfig& cfg, const ThreeWaySplit<LabeledDoc>& tweets,
    const ThreeWaySplit<LabeledDoc>& essays) {
  CrossDomainResult result;
  result.config = cfg;

  TaskConfig tc = detail::task_config_for(cfg, TaskKind::Binary,
                                          ModelKind::LG);
  auto fit = [&](const std::vector<LabeledDoc>& train,
                 const std::vector<LabeledDoc>& val, uint64_t seed) {
    if (train.empty())
      throw std::runtime_error("cross-domain: empty training split");
    return detail::fit_task_model(detail::features(train),
                                  detail::binary_ids(train),
                                  detail::features(val),
                                  detail::binary_ids(val), tc, seed);
  };

  std::vector<LabeledDoc> combined = tweets.train;
  combined.insert(combined.end(), essays.train.begin(), essays.train.end());

  struct TrainSide {
    std::string name;
    detail::TrainedPredictor model;
  };
  std::vector<TrainSide> sides;
  sides.push_back({"tweets", fit(tweets.train, tweets.val, tc.seed)});
  sides.push_back(
      {"essays", fit(essays.train, essays.val, Rng::substream(cfg.seed, 4))});
  sides.push_back(
      {"tweets+essays", fit(combined, tweets.val, Rng::substream(cfg.seed, 5))});

  struct EvalSide {
    std::string name;
    const std::vector<LabeledDoc>* test;
  };
  std::vector<EvalSide> evals = {{"tweets", &tweets.test},
                                 {"essays", &essays.test}};

  for (const auto& side : sides) {
    for (const auto& eval : evals) {
      if (eval.test->empty())
        throw std::runtime_error("cross-domain: empty test split (" +
                                 eval.name + ")");
      CrossDomainCell cell;
      cell.train_on = side.name;
      cell.eval_on = eval.name;
      cell.predictions.task = TaskKind::Binary;
      cell.predictions.model = ModelKind::LG;
      cell.predictions.binary_labels = true;
      cell.predictions.label_names = kBinaryClasses;
      cell.predictions.lambdas = side.model.lambdas;
      for (const auto& d : *eval.test) cell.predictions.ids.push_back(d.id);
      cell.predictions.gold = detail::binary_ids(*eval.test);
      cell.predictions.pred =
          side.model.predict(detail::features(*eval.test));
      cell.claim =
          detail::eval_against(cell.predictions, kBinaryClasses).at("claim");
      result.cells.push_back(std::move(cell));
    }
  }

  auto fmt2 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  std::string tsv =
      "train_on\tp_tweets\tr_tweets\tf1_tweets\tp_essays\tr_essays\tf1_"
      "essays\n";
  for (const auto& side : sides) {
    tsv += side.name;
    for (const auto& eval : evals) {
      for (const auto& cell : result.cells) {
        if (cell.train_on == side.name && cell.eval_on == eval.name) {
          tsv += "\t" + fmt2(cell.claim.precision) + "\t" +
                 fmt2(cell.claim.recall) + "\t" + fmt2(cell.claim.f1);
        }
      }
    }
    tsv += "\n";
  }
  result.report_tsv = tsv;

  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : result.cells) {
    nlohmann::ordered_json cj;
    cj["train_on"] = cell.train_on;
    cj["eval_on"] = cell.eval_on;
    cj["lambdas"] = cell.predictions.lambdas;
    cj["claim"] = {{"precision", cell.claim.precision},
                   {"recall", cell.claim.recall},
                   {"f1", cell.claim.f1},
                   {"support", cell.claim.support}};
    j["cells"].push_back(std::move(cj));
  }
  result.report_json = std::move(j);

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    detail::write_text_file(fs::path(cfg.output_dir) / "cross_domain.tsv",
                            result.report_tsv);
    detail::write_text_file(fs::path(cfg.output_dir) / "cross_domain.json",
                            result.report_json.dump(2) + "\n");
    for (const auto& cell : result.cells) {
      std::string train_tag =
          cell.train_on == "tweets+essays" ? "combined" : cell.train_on;
      std::string name = "predictions_xd_" + train_tag + "_" + cell.eval_on +
                         ".tsv";
      detail::write_text_file(fs::path(cfg.output_dir) / name,
                              predictions_tsv(cell.predictions));
    }
  }
  return result;
}

inline CrossDomainResult run_cross_domain(const ExperimentConfig& cfg) {
  if (cfg.tweet_corpus.empty())
    throw std::runtime_error("config: tweet_corpus is required");
  if (cfg.essay_dir.empty())
    throw std::runtime_error("config: essay_dir is required");
  if (cfg.embeddings.empty())
    throw std::runtime_error("config: embeddings is required");
  if (cfg.split.train + cfg.split.val + cfg.split.test == 0)
    throw std::runtime_error("config: split sizes are required");
  auto records = load_tweet_corpus(cfg.tweet_corpus);
  auto table = load_vec(cfg.embeddings,
                        cfg.embedding_limit > 0
                            ? std::optional<size_t>(cfg.embedding_limit)
                            : std::nullopt);
  auto tweet_docs = embed_tweets(records, table);
  auto tweets =
      split_three(tweet_docs, cfg.split, Rng::substream(cfg.seed, 0));
  EssayCorpus essay_corpus = load_essay_conll(cfg.essay_dir);
  ThreeWaySplit<LabeledDoc> essays;
  essays.train = embed_essays(essay_corpus.train, table);
  essays.val = embed_essays(essay_corpus.dev, table);
  essays.test = embed_essays(essay_corpus.test, table);
  return run_cross_domain_on_docs(cfg, tweets, essays);
}

}  // namespace bioclaim
