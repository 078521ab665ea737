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
#include <array>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bioclaim/types.hpp"

namespace bioclaim {

struct ConfusionMatrix {
  std::vector<std::string> classes;            // fixed order
  std::vector<std::vector<long long>> counts;  // counts[gold][pred]

  long long total() const {
    long long t = 0;
    for (auto& row : counts)
      for (long long c : row) t += c;
    return t;
  }
};

inline ConfusionMatrix confusion(const std::vector<std::string>& gold,
                                 const std::vector<std::string>& pred,
                                 const std::vector<std::string>& classes) {
  if (gold.size() != pred.size()) {
    throw std::runtime_error("confusion: gold and pred lengths differ (" +
                             std::to_string(gold.size()) + " vs " +
                             std::to_string(pred.size()) + ")");
  }
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(),
                   std::vector<long long>(classes.size(), 0));
  for (size_t i = 0; i < gold.size(); ++i) {
    auto g = index.find(gold[i]);
    auto p = index.find(pred[i]);
    if (g == index.end())
      throw std::runtime_error("confusion: unknown gold label '" + gold[i] +
                               "' at item " + std::to_string(i));
    if (p == index.end())
      throw std::runtime_error("confusion: unknown predicted label '" +
                               pred[i] + "' at item " + std::to_string(i));
    ++cm.counts[g->second][p->second];
  }
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long support = 0;
};

// One-vs-rest precision/recall/F1 per class, aligned with cm.classes.
// 0/0 is defined as 0.
inline std::vector<ClassMetrics> prf_per_class(const ConfusionMatrix& cm) {
  const size_t k = cm.classes.size();
  std::vector<ClassMetrics> out(k);
  for (size_t c = 0; c < k; ++c) {
    long long tp = cm.counts[c][c];
    long long fp = 0;
    long long fn = 0;
    for (size_t g = 0; g < k; ++g) {
      if (g != c) fp += cm.counts[g][c];
    }
    for (size_t p = 0; p < k; ++p) {
      if (p != c) fn += cm.counts[c][p];
      out[c].support += cm.counts[c][p];
    }
    out[c].precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
    out[c].recall = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
    double pr = out[c].precision + out[c].recall;
    out[c].f1 = pr > 0 ? 2.0 * out[c].precision * out[c].recall / pr : 0.0;
  }
  return out;
}

struct AgreementResult {
  double kappa = 0.0;
  double p_o = 0.0;
  double p_e = 0.0;
  size_t n_items = 0;
};

inline AgreementResult cohen_kappa(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  if (a.size() != b.size()) {
    throw std::runtime_error("cohen_kappa: annotation lengths differ (" +
                             std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw std::runtime_error("cohen_kappa: empty annotations");
  const double n = double(a.size());
  std::map<std::string, long long> ma, mb;
  long long agree = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ++ma[a[i]];
    ++mb[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  AgreementResult r;
  r.n_items = a.size();
  r.p_o = double(agree) / n;
  r.p_e = 0.0;
  for (auto& [label, ca] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) r.p_e += (double(ca) / n) * (double(it->second) / n);
  }
  if (1.0 - r.p_e < 1e-12) {
    r.kappa = 1.0;  // only reachable together with p_o = 1
  } else {
    r.kappa = (r.p_o - r.p_e) / (1.0 - r.p_e);
  }
  return r;
}

// Token-level span agreement: every token of every doc becomes a binary
// in-claim/out-of-claim item per annotator (in-claim iff the token's byte
// range overlaps any of that annotator's spans), pooled over all docs.
inline AgreementResult token_span_kappa(
    const std::vector<std::vector<CharSpan>>& tokens_per_doc,
    const std::vector<std::vector<CharSpan>>& spans_a,
    const std::vector<std::vector<CharSpan>>& spans_b) {
  if (tokens_per_doc.size() != spans_a.size() ||
      tokens_per_doc.size() != spans_b.size()) {
    throw std::runtime_error(
        "token_span_kappa: doc counts differ between tokens and annotators");
  }
  std::vector<std::string> a, b;
  for (size_t d = 0; d < tokens_per_doc.size(); ++d) {
    const auto& toks = tokens_per_doc[d];
    size_t extent = 0;
    for (const auto& t : toks) extent = std::max(extent, t.end);
    for (const auto* spans : {&spans_a[d], &spans_b[d]}) {
      for (const auto& s : *spans) {
        if (s.begin >= s.end || s.end > extent) {
          throw std::runtime_error(
              "token_span_kappa: span [" + std::to_string(s.begin) + "," +
              std::to_string(s.end) + ") outside doc " + std::to_string(d) +
              " (extent " + std::to_string(extent) + ")");
        }
      }
    }
    auto in_any = [](const CharSpan& tok, const std::vector<CharSpan>& spans) {
      return std::any_of(spans.begin(), spans.end(),
                         [&](const CharSpan& s) { return tok.overlaps(s); });
    };
    for (const auto& t : toks) {
      a.push_back(in_any(t, spans_a[d]) ? "in" : "out");
      b.push_back(in_any(t, spans_b[d]) ? "in" : "out");
    }
  }
  return cohen_kappa(a, b);
}

struct ReportRow {
  std::string eval_mode;  // "binary" or "multiclass"
  std::string task;
  std::string klass;
  std::string model;
  ClassMetrics metrics;
};

// Plain-table layout with one row per (eval mode, task, class) and P/R/F1
// columns per model, two decimals.
inline std::string report_table(const std::vector<ReportRow>& rows,
                                const std::vector<std::string>& models) {
  auto fmt2 = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  std::string out = "eval\ttask\tclass";
  for (const auto& m : models) {
    out += "\t" + m + "_P\t" + m + "_R\t" + m + "_F1";
  }
  out += "\n";
  std::vector<std::array<std::string, 3>> keys;
  for (const auto& r : rows) {
    std::array<std::string, 3> k{r.eval_mode, r.task, r.klass};
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      keys.push_back(k);
  }
  for (const auto& k : keys) {
    out += k[0] + "\t" + k[1] + "\t" + k[2];
    for (const auto& m : models) {
      const ReportRow* found = nullptr;
      for (const auto& r : rows) {
        if (r.eval_mode == k[0] && r.task == k[1] && r.klass == k[2] &&
            r.model == m) {
          found = &r;
          break;
        }
      }
      if (found) {
        out += "\t" + fmt2(found->metrics.precision) + "\t" +
               fmt2(found->metrics.recall) + "\t" + fmt2(found->metrics.f1);
      } else {
        out += "\t-\t-\t-";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace bioclaim
