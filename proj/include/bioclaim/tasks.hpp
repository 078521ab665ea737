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

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bioclaim/embeddings.hpp"
#include "bioclaim/models.hpp"
#include "bioclaim/rng.hpp"
#include "bioclaim/types.hpp"

namespace bioclaim {

enum class TaskKind { Binary, Multiclass, Pipeline };
enum class ModelKind { NB, LG };

inline const char* to_string(TaskKind t) {
  switch (t) {
    case TaskKind::Binary: return "binary";
    case TaskKind::Multiclass: return "multiclass";
    case TaskKind::Pipeline: return "pipeline";
  }
  return "?";
}

inline TaskKind task_from_string(const std::string& s) {
  if (s == "binary") return TaskKind::Binary;
  if (s == "multiclass") return TaskKind::Multiclass;
  if (s == "pipeline") return TaskKind::Pipeline;
  throw std::runtime_error("unknown task '" + s + "'");
}

inline const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::NB: return "nb";
    case ModelKind::LG: return "lg";
  }
  return "?";
}

inline ModelKind model_from_string(const std::string& s) {
  if (s == "nb") return ModelKind::NB;
  if (s == "lg") return ModelKind::LG;
  throw std::runtime_error("unknown model '" + s + "'");
}

// A document ready for classification: id, averaged embedding, gold label.
struct LabeledDoc {
  std::string id;
  DocVector vec;
  Label3 label = Label3::NonClaim;
};

struct TaskConfig {
  ModelKind model = ModelKind::LG;
  TrainConfig train;
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1};
  uint64_t seed = 0;         // oversampling stream (stage 1 for pipeline)
  uint64_t stage2_seed = 1;  // oversampling stream for pipeline stage 2
};

// Test-set predictions of one task run. Labels are class ids indexing
// label_names: binary = {non_claim, claim}, otherwise
// {non_claim, explicit, implicit}.
struct PredictionSet {
  TaskKind task = TaskKind::Binary;
  ModelKind model = ModelKind::LG;
  bool binary_labels = false;
  std::vector<std::string> label_names;
  std::vector<std::string> ids;
  std::vector<int> gold;
  std::vector<int> pred;
  std::vector<double> lambdas;  // selected l2 strengths; empty for NB

  std::vector<std::string> gold_names() const {
    std::vector<std::string> out;
    out.reserve(gold.size());
    for (int g : gold) out.push_back(label_names.at(size_t(g)));
    return out;
  }
  std::vector<std::string> pred_names() const {
    std::vector<std::string> out;
    out.reserve(pred.size());
    for (int p : pred) out.push_back(label_names.at(size_t(p)));
    return out;
  }
};

namespace detail {

inline void check_splits(const std::vector<LabeledDoc>& train,
                         const std::vector<LabeledDoc>& val,
                         const std::vector<LabeledDoc>& test) {
  if (train.empty()) throw std::runtime_error("empty training split");
  if (test.empty()) throw std::runtime_error("empty test split");
  std::unordered_set<std::string> seen;
  for (const auto* split : {&train, &val, &test}) {
    for (const auto& d : *split) {
      if (!seen.insert(d.id).second)
        throw std::runtime_error("splits share doc id '" + d.id + "'");
    }
  }
}

inline Matrix features(const std::vector<LabeledDoc>& docs) {
  Matrix X;
  X.reserve(docs.size());
  for (const auto& d : docs) X.push_back(d.vec.values);
  return X;
}

inline std::vector<int> binary_ids(const std::vector<LabeledDoc>& docs) {
  std::vector<int> y;
  y.reserve(docs.size());
  for (const auto& d : docs) y.push_back(int(to_binary(d.label)));
  return y;
}

inline std::vector<int> multiclass_ids(const std::vector<LabeledDoc>& docs) {
  std::vector<int> y;
  y.reserve(docs.size());
  for (const auto& d : docs) y.push_back(int(d.label));
  return y;
}

inline double macro_f1_ids(const std::vector<int>& gold,
                           const std::vector<int>& pred,
                           const std::vector<int>& classes) {
  double sum = 0.0;
  for (int c : classes) {
    long long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == c && gold[i] == c) ++tp;
      else if (pred[i] == c) ++fp;
      else if (gold[i] == c) ++fn;
    }
    double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    sum += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return classes.empty() ? 0.0 : sum / double(classes.size());
}

struct TrainedPredictor {
  std::optional<GaussianNBParams> nb;
  std::optional<LogisticRegressionParams> lg;
  std::optional<int> constant;  // degenerate single-class training set
  std::vector<double> lambdas;

  std::vector<int> predict(const Matrix& X) const {
    if (constant) return std::vector<int>(X.size(), *constant);
    if (nb) return nb_predict(*nb, X);
    return lg_predict(*lg, X);
  }
};

// Oversamples the training set to class balance, fits the configured model,
// and for LG picks the l2 strength with the best macro-F1 on the validation
// set (earlier grid entries win ties; with no validation data the first grid
// entry is used).
inline TrainedPredictor fit_task_model(Matrix X, std::vector<int> y,
                                       const Matrix& X_val,
                                       const std::vector<int>& y_val,
                                       const TaskConfig& cfg,
                                       uint64_t oversample_seed) {
  oversample(X, y, oversample_seed);
  TrainedPredictor out;
  if (cfg.model == ModelKind::NB) {
    out.nb = nb_fit(X, y);
    return out;
  }
  if (cfg.lambda_grid.empty())
    throw std::runtime_error("empty lambda grid");
  std::vector<int> classes = sorted_classes(y);
  double best = -1.0;
  for (double lambda : cfg.lambda_grid) {
    LogisticRegressionParams p = lg_fit(X, y, cfg.train, lambda);
    if (!out.lg) {
      out.lg = p;
      out.lambdas = {lambda};
    }
    if (X_val.empty()) break;
    double f1 = macro_f1_ids(y_val, lg_predict(p, X_val), classes);
    if (f1 > best) {
      best = f1;
      out.lg = std::move(p);
      out.lambdas = {lambda};
    }
  }
  return out;
}

}  // namespace detail

// Claim vs non-claim over all three gold labels.
inline PredictionSet run_binary(const std::vector<LabeledDoc>& train,
                                const std::vector<LabeledDoc>& val,
                                const std::vector<LabeledDoc>& test,
                                const TaskConfig& cfg) {
  detail::check_splits(train, val, test);
  auto model = detail::fit_task_model(
      detail::features(train), detail::binary_ids(train),
      detail::features(val), detail::binary_ids(val), cfg, cfg.seed);
  PredictionSet out;
  out.task = TaskKind::Binary;
  out.model = cfg.model;
  out.binary_labels = true;
  out.label_names = {"non_claim", "claim"};
  out.lambdas = model.lambdas;
  out.ids.reserve(test.size());
  for (const auto& d : test) out.ids.push_back(d.id);
  out.gold = detail::binary_ids(test);
  out.pred = model.predict(detail::features(test));
  return out;
}

// Direct three-way classification.
inline PredictionSet run_multiclass(const std::vector<LabeledDoc>& train,
                                    const std::vector<LabeledDoc>& val,
                                    const std::vector<LabeledDoc>& test,
                                    const TaskConfig& cfg) {
  detail::check_splits(train, val, test);
  auto model = detail::fit_task_model(
      detail::features(train), detail::multiclass_ids(train),
      detail::features(val), detail::multiclass_ids(val), cfg, cfg.seed);
  PredictionSet out;
  out.task = TaskKind::Multiclass;
  out.model = cfg.model;
  out.binary_labels = false;
  out.label_names = {"non_claim", "explicit", "implicit"};
  out.lambdas = model.lambdas;
  out.ids.reserve(test.size());
  for (const auto& d : test) out.ids.push_back(d.id);
  out.gold = detail::multiclass_ids(test);
  out.pred = model.predict(detail::features(test));
  return out;
}

// Stage 1 is the binary task verbatim; stage 2 separates explicit from
// implicit, is trained on the gold claims of the training split (validated
// on the gold claims of the validation split), and only runs on stage-1
// positives. Stage-1 negatives come out as non_claim.
inline PredictionSet run_pipeline(const std::vector<LabeledDoc>& train,
                                  const std::vector<LabeledDoc>& val,
                                  const std::vector<LabeledDoc>& test,
                                  const TaskConfig& cfg) {
  detail::check_splits(train, val, test);
  std::vector<LabeledDoc> train2, val2;
  for (const auto& d : train)
    if (d.label != Label3::NonClaim) train2.push_back(d);
  for (const auto& d : val)
    if (d.label != Label3::NonClaim) val2.push_back(d);
  if (train2.empty())
    throw std::runtime_error("pipeline: no claims in training split");

  PredictionSet stage1 = run_binary(train, val, test, cfg);

  std::set<int> distinct;
  for (const auto& d : train2) distinct.insert(int(d.label));
  detail::TrainedPredictor model2;
  if (distinct.size() == 1) {
    model2.constant = *distinct.begin();
  } else {
    model2 = detail::fit_task_model(
        detail::features(train2), detail::multiclass_ids(train2),
        detail::features(val2), detail::multiclass_ids(val2), cfg,
        cfg.stage2_seed);
  }

  PredictionSet out;
  out.task = TaskKind::Pipeline;
  out.model = cfg.model;
  out.binary_labels = false;
  out.label_names = {"non_claim", "explicit", "implicit"};
  out.lambdas = stage1.lambdas;
  out.lambdas.insert(out.lambdas.end(), model2.lambdas.begin(),
                     model2.lambdas.end());
  out.ids = stage1.ids;
  out.gold = detail::multiclass_ids(test);

  Matrix X_pos;
  std::vector<size_t> pos_index;
  for (size_t i = 0; i < test.size(); ++i) {
    if (stage1.pred[i] == 1) {
      X_pos.push_back(test[i].vec.values);
      pos_index.push_back(i);
    }
  }
  out.pred.assign(test.size(), int(Label3::NonClaim));
  if (!X_pos.empty()) {
    std::vector<int> pred2 = model2.predict(X_pos);
    for (size_t k = 0; k < pos_index.size(); ++k)
      out.pred[pos_index[k]] = pred2[k];
  }
  return out;
}

// Collapses three-way predictions to claim vs non-claim for binary-mode
// evaluation. Rejects already-binary prediction sets.
inline PredictionSet collapse_to_binary(const PredictionSet& s) {
  if (s.binary_labels)
    throw std::runtime_error("collapse_to_binary: predictions already binary");
  PredictionSet out = s;
  out.binary_labels = true;
  out.label_names = {"non_claim", "claim"};
  for (auto& g : out.gold) g = g == 0 ? 0 : 1;
  for (auto& p : out.pred) p = p == 0 ? 0 : 1;
  return out;
}

inline std::string predictions_tsv(const PredictionSet& s) {
  std::string out = "doc_id\tgold\tpredicted\ttask\tmodel\n";
  auto gold = s.gold_names();
  auto pred = s.pred_names();
  for (size_t i = 0; i < s.ids.size(); ++i) {
    out += s.ids[i] + "\t" + gold[i] + "\t" + pred[i] + "\t" +
           to_string(s.task) + "\t" + to_string(s.model) + "\n";
  }
  return out;
}

}  // namespace bioclaim
