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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bioclaim/rng.hpp"

namespace bioclaim {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

inline std::vector<int> sorted_classes(const std::vector<int>& y) {
  std::vector<int> classes(y);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

inline void check_xy(const Matrix& X, const std::vector<int>& y) {
  if (X.size() != y.size())
    throw std::runtime_error("fit: |X| != |y| (" + std::to_string(X.size()) +
                             " vs " + std::to_string(y.size()) + ")");
  if (X.empty()) throw std::runtime_error("fit: empty training set");
  for (size_t i = 1; i < X.size(); ++i) {
    if (X[i].size() != X[0].size())
      throw std::runtime_error("fit: ragged feature matrix at row " +
                               std::to_string(i));
  }
}

// argmax with ties broken toward the lowest index
inline size_t argmax(const std::vector<double>& v) {
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline double logsumexp(const std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

struct GaussianNBParams {
  std::vector<int> classes;  // ascending; prediction ties resolve to first
  std::vector<double> log_priors;
  Matrix means;      // classes x dim
  Matrix variances;  // classes x dim, floored by smoothing
  double var_smoothing = 1e-9;
};

// Per-class, per-feature sample mean and population variance (divisor n).
// Variances are floored by var_smoothing times the largest per-feature
// variance of the pooled data, matching common evaluation-tool behavior.
inline GaussianNBParams nb_fit(const Matrix& X, const std::vector<int>& y,
                               double var_smoothing = 1e-9) {
  detail::check_xy(X, y);
  GaussianNBParams p;
  p.var_smoothing = var_smoothing;
  p.classes = detail::sorted_classes(y);
  if (p.classes.size() < 2)
    throw std::runtime_error("nb_fit: need at least 2 classes, got " +
                             std::to_string(p.classes.size()));
  const size_t k = p.classes.size();
  const size_t d = X[0].size();
  const size_t n = X.size();

  // pooled per-feature variance for the smoothing floor
  double max_pooled_var = 0.0;
  for (size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += X[i][j];
    mean /= double(n);
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double diff = X[i][j] - mean;
      var += diff * diff;
    }
    var /= double(n);
    max_pooled_var = std::max(max_pooled_var, var);
  }
  double eps = var_smoothing * max_pooled_var;
  if (eps <= 0.0) eps = var_smoothing;  // fully constant data

  std::map<int, size_t> class_index;
  for (size_t c = 0; c < k; ++c) class_index[p.classes[c]] = c;
  std::vector<long long> counts(k, 0);
  p.means.assign(k, std::vector<double>(d, 0.0));
  p.variances.assign(k, std::vector<double>(d, 0.0));
  for (size_t i = 0; i < n; ++i) {
    size_t c = class_index.at(y[i]);
    ++counts[c];
    for (size_t j = 0; j < d; ++j) p.means[c][j] += X[i][j];
  }
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < d; ++j) p.means[c][j] /= double(counts[c]);
  }
  for (size_t i = 0; i < n; ++i) {
    size_t c = class_index.at(y[i]);
    for (size_t j = 0; j < d; ++j) {
      double diff = X[i][j] - p.means[c][j];
      p.variances[c][j] += diff * diff;
    }
  }
  p.log_priors.resize(k);
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < d; ++j) {
      p.variances[c][j] = p.variances[c][j] / double(counts[c]) + eps;
    }
    p.log_priors[c] = std::log(double(counts[c]) / double(n));
  }
  return p;
}

// Normalized log posterior: log prior + sum of log Gaussian densities,
// shifted so the exponentials sum to 1.
inline std::vector<double> nb_log_posterior(const GaussianNBParams& p,
                                            const std::vector<double>& x) {
  if (x.size() != p.means.at(0).size())
    throw std::runtime_error("nb_log_posterior: dim mismatch (" +
                             std::to_string(x.size()) + " vs " +
                             std::to_string(p.means[0].size()) + ")");
  const size_t k = p.classes.size();
  std::vector<double> joint(k);
  constexpr double kLog2Pi = 1.8378770664093454836;
  for (size_t c = 0; c < k; ++c) {
    double ll = p.log_priors[c];
    for (size_t j = 0; j < x.size(); ++j) {
      double var = p.variances[c][j];
      double diff = x[j] - p.means[c][j];
      ll += -0.5 * (kLog2Pi + std::log(var)) - diff * diff / (2.0 * var);
    }
    joint[c] = ll;
  }
  double lse = detail::logsumexp(joint);
  for (double& v : joint) v -= lse;
  return joint;
}

inline int nb_predict(const GaussianNBParams& p, const std::vector<double>& x) {
  return p.classes[detail::argmax(nb_log_posterior(p, x))];
}

inline std::vector<int> nb_predict(const GaussianNBParams& p,
                                   const Matrix& X) {
  std::vector<int> out;
  out.reserve(X.size());
  for (const auto& x : X) out.push_back(nb_predict(p, x));
  return out;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression, full-batch gradient descent
// ---------------------------------------------------------------------------

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  uint64_t seed = 0;  // reserved for shuffling hooks; optimization is
                      // deterministic from zero-initialized weights
  double tolerance = 1e-6;
};

struct LogisticRegressionParams {
  std::vector<int> classes;
  Matrix weights;  // classes x dim
  std::vector<double> bias;
  double l2_lambda = 0.0;
};

inline std::vector<double> lg_logits(const LogisticRegressionParams& p,
                                     const std::vector<double>& x) {
  if (x.size() != p.weights.at(0).size())
    throw std::runtime_error("lg: dim mismatch (" + std::to_string(x.size()) +
                             " vs " + std::to_string(p.weights[0].size()) +
                             ")");
  std::vector<double> z(p.classes.size());
  for (size_t c = 0; c < p.classes.size(); ++c) {
    double s = p.bias[c];
    const auto& w = p.weights[c];
    for (size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
    z[c] = s;
  }
  return z;
}

inline std::vector<double> lg_predict_proba(const LogisticRegressionParams& p,
                                            const std::vector<double>& x) {
  std::vector<double> z = lg_logits(p, x);
  double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

inline int lg_predict(const LogisticRegressionParams& p,
                      const std::vector<double>& x) {
  return p.classes[detail::argmax(lg_predict_proba(p, x))];
}

inline std::vector<int> lg_predict(const LogisticRegressionParams& p,
                                   const Matrix& X) {
  std::vector<int> out;
  out.reserve(X.size());
  for (const auto& x : X) out.push_back(lg_predict(p, x));
  return out;
}

// Mean cross-entropy of the softmax outputs plus (lambda/2)*||W||^2; the
// bias is unpenalized. y holds class ids, translated via p.classes.
inline double lg_loss(const LogisticRegressionParams& p, const Matrix& X,
                      const std::vector<int>& y) {
  std::map<int, size_t> class_index;
  for (size_t c = 0; c < p.classes.size(); ++c) class_index[p.classes[c]] = c;
  double loss = 0.0;
  for (size_t i = 0; i < X.size(); ++i) {
    std::vector<double> z = lg_logits(p, X[i]);
    double lse = detail::logsumexp(z);
    loss -= z[class_index.at(y[i])] - lse;
  }
  loss /= double(X.size());
  double penalty = 0.0;
  for (const auto& row : p.weights)
    for (double w : row) penalty += w * w;
  return loss + 0.5 * p.l2_lambda * penalty;
}

// Analytic gradient of lg_loss at p, written into grad_w / grad_b.
inline void lg_gradient(const LogisticRegressionParams& p, const Matrix& X,
                        const std::vector<int>& y, Matrix& grad_w,
                        std::vector<double>& grad_b) {
  const size_t k = p.classes.size();
  const size_t d = p.weights[0].size();
  std::map<int, size_t> class_index;
  for (size_t c = 0; c < k; ++c) class_index[p.classes[c]] = c;
  grad_w.assign(k, std::vector<double>(d, 0.0));
  grad_b.assign(k, 0.0);
  for (size_t i = 0; i < X.size(); ++i) {
    std::vector<double> prob = lg_predict_proba(p, X[i]);
    prob[class_index.at(y[i])] -= 1.0;
    for (size_t c = 0; c < k; ++c) {
      grad_b[c] += prob[c];
      for (size_t j = 0; j < d; ++j) grad_w[c][j] += prob[c] * X[i][j];
    }
  }
  const double inv_n = 1.0 / double(X.size());
  for (size_t c = 0; c < k; ++c) {
    grad_b[c] *= inv_n;
    for (size_t j = 0; j < d; ++j) {
      grad_w[c][j] = grad_w[c][j] * inv_n + p.l2_lambda * p.weights[c][j];
    }
  }
}

inline LogisticRegressionParams lg_fit(const Matrix& X,
                                       const std::vector<int>& y,
                                       const TrainConfig& config,
                                       double l2_lambda) {
  detail::check_xy(X, y);
  LogisticRegressionParams p;
  p.classes = detail::sorted_classes(y);
  if (p.classes.size() < 2)
    throw std::runtime_error("lg_fit: need at least 2 classes, got " +
                             std::to_string(p.classes.size()));
  p.l2_lambda = l2_lambda;
  const size_t k = p.classes.size();
  const size_t d = X[0].size();
  p.weights.assign(k, std::vector<double>(d, 0.0));
  p.bias.assign(k, 0.0);

  Matrix grad_w;
  std::vector<double> grad_b;
  double prev_loss = lg_loss(p, X, y);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    lg_gradient(p, X, y, grad_w, grad_b);
    for (size_t c = 0; c < k; ++c) {
      p.bias[c] -= config.learning_rate * grad_b[c];
      for (size_t j = 0; j < d; ++j) {
        p.weights[c][j] -= config.learning_rate * grad_w[c][j];
      }
    }
    double loss = lg_loss(p, X, y);
    if (!std::isfinite(loss)) {
      throw std::runtime_error(
          "lg_fit: loss diverged at epoch " + std::to_string(epoch) +
          "; reduce learning_rate (current " +
          std::to_string(config.learning_rate) + ")");
    }
    if (std::abs(prev_loss - loss) < config.tolerance) break;
    prev_loss = loss;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Minority-class oversampling
// ---------------------------------------------------------------------------

// Upsamples every non-majority class by drawing its own instances uniformly
// with replacement until all class counts equal the majority count. The
// original instances stay in place; draws are appended per class in
// ascending class-id order. Training data only, by contract.
template <class T>
inline void oversample(std::vector<T>& X, std::vector<int>& y,
                       uint64_t seed) {
  if (X.size() != y.size())
    throw std::runtime_error("oversample: |X| != |y|");
  if (X.empty()) throw std::runtime_error("oversample: empty input");
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  size_t majority = 0;
  for (auto& [c, idx] : by_class) majority = std::max(majority, idx.size());
  Rng rng(seed);
  for (auto& [c, idx] : by_class) {
    for (size_t need = majority - idx.size(); need > 0; --need) {
      size_t pick = idx[size_t(rng.bounded(idx.size()))];
      X.push_back(X[pick]);
      y.push_back(c);
    }
  }
}

// ---------------------------------------------------------------------------
// Model persistence
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json nb_to_json(const GaussianNBParams& p) {
  nlohmann::ordered_json j;
  j["model"] = "gaussian_nb";
  j["classes"] = p.classes;
  j["dim"] = p.means.empty() ? 0 : p.means[0].size();
  j["log_priors"] = p.log_priors;
  j["means"] = p.means;
  j["variances"] = p.variances;
  j["var_smoothing"] = p.var_smoothing;
  return j;
}

inline GaussianNBParams nb_from_json(const nlohmann::json& j) {
  if (j.at("model") != "gaussian_nb")
    throw std::runtime_error("nb_from_json: not a gaussian_nb document");
  GaussianNBParams p;
  p.classes = j.at("classes").get<std::vector<int>>();
  p.log_priors = j.at("log_priors").get<std::vector<double>>();
  p.means = j.at("means").get<Matrix>();
  p.variances = j.at("variances").get<Matrix>();
  p.var_smoothing = j.at("var_smoothing").get<double>();
  return p;
}

inline nlohmann::ordered_json lg_to_json(const LogisticRegressionParams& p) {
  nlohmann::ordered_json j;
  j["model"] = "logistic_regression";
  j["classes"] = p.classes;
  j["dim"] = p.weights.empty() ? 0 : p.weights[0].size();
  j["weights"] = p.weights;
  j["bias"] = p.bias;
  j["l2_lambda"] = p.l2_lambda;
  return j;
}

inline LogisticRegressionParams lg_from_json(const nlohmann::json& j) {
  if (j.at("model") != "logistic_regression")
    throw std::runtime_error(
        "lg_from_json: not a logistic_regression document");
  LogisticRegressionParams p;
  p.classes = j.at("classes").get<std::vector<int>>();
  p.weights = j.at("weights").get<Matrix>();
  p.bias = j.at("bias").get<std::vector<double>>();
  p.l2_lambda = j.at("l2_lambda").get<double>();
  return p;
}

inline void save_model(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << doc.dump(2) << "\n";
}

inline nlohmann::json load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model_json: cannot open " + path);
  return nlohmann::json::parse(in);
}

}  // namespace bioclaim
