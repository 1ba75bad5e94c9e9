// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/probe.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "soundtex/errors.hpp"

namespace soundtex {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr int kMaxBacktracks = 50;

void check_dataset(const Matrix& x, const std::vector<int>& y) {
  if (x.rows == 0) throw InvalidInputError("probe: empty dataset");
  if (x.cols == 0) throw InvalidInputError("probe: zero-dimensional rows");
  if (y.size() != x.rows) throw InvalidInputError("probe: label count mismatch");
  for (int label : y) {
    if (label < 0) throw InvalidInputError("probe: negative label");
  }
  for (double v : x.data) {
    if (!std::isfinite(v)) throw InvalidInputError("probe: non-finite feature");
  }
}

int infer_classes(const std::vector<int>& y) {
  int max_label = 0;
  for (int label : y) max_label = std::max(max_label, label);
  return max_label + 1;
}

// Row loss and probabilities with the usual max-logit shift for
// numerical stability.
void row_probabilities(const double* logits, int k, double* probs) {
  double max_logit = logits[0];
  for (int c = 1; c < k; ++c) max_logit = std::max(max_logit, logits[c]);
  double z = 0.0;
  for (int c = 0; c < k; ++c) {
    probs[c] = std::exp(logits[c] - max_logit);
    z += probs[c];
  }
  const double inv_z = 1.0 / z;
  for (int c = 0; c < k; ++c) probs[c] *= inv_z;
}

void compute_logits(const Matrix& weights, const std::vector<double>& bias,
                    const double* xi, double* logits) {
  const int k = static_cast<int>(weights.rows);
  const std::size_t dim = weights.cols;
  for (int c = 0; c < k; ++c) {
    const double* w = weights.row(static_cast<std::size_t>(c));
    double dot = bias[static_cast<std::size_t>(c)];
    for (std::size_t d = 0; d < dim; ++d) dot += w[d] * xi[d];
    logits[static_cast<std::size_t>(c)] = dot;
  }
}

}  // namespace

double softmax_loss(const Matrix& weights, const std::vector<double>& bias,
                    const Matrix& x, const std::vector<int>& y, double l2) {
  const std::size_t n = x.rows;
  const int k = static_cast<int>(weights.rows);
  std::vector<double> logits(static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    compute_logits(weights, bias, x.row(i), logits.data());
    double max_logit = logits[0];
    for (int c = 1; c < k; ++c) {
      max_logit = std::max(max_logit, logits[static_cast<std::size_t>(c)]);
    }
    double z = 0.0;
    for (int c = 0; c < k; ++c) {
      z += std::exp(logits[static_cast<std::size_t>(c)] - max_logit);
    }
    total += std::log(z) - (logits[static_cast<std::size_t>(y[i])] - max_logit);
  }
  double penalty = 0.0;
  for (double w : weights.data) penalty += w * w;
  return total / static_cast<double>(n) + 0.5 * l2 * penalty;
}

void softmax_loss_gradient(const Matrix& weights, const std::vector<double>& bias,
                           const Matrix& x, const std::vector<int>& y, double l2,
                           Matrix* grad_weights, std::vector<double>* grad_bias) {
  const std::size_t n = x.rows;
  const std::size_t dim = x.cols;
  const int k = static_cast<int>(weights.rows);
  *grad_weights = Matrix(weights.rows, dim, 0.0);
  grad_bias->assign(static_cast<std::size_t>(k), 0.0);
  std::vector<double> logits(static_cast<std::size_t>(k));
  std::vector<double> probs(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    compute_logits(weights, bias, xi, logits.data());
    row_probabilities(logits.data(), k, probs.data());
    probs[static_cast<std::size_t>(y[i])] -= 1.0;
    for (int c = 0; c < k; ++c) {
      const double g = probs[static_cast<std::size_t>(c)];
      if (g == 0.0) continue;
      double* gw = grad_weights->row(static_cast<std::size_t>(c));
      for (std::size_t d = 0; d < dim; ++d) gw[d] += g * xi[d];
      (*grad_bias)[static_cast<std::size_t>(c)] += g;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < grad_weights->data.size(); ++i) {
    grad_weights->data[i] = grad_weights->data[i] * inv_n + l2 * weights.data[i];
  }
  for (double& g : *grad_bias) g *= inv_n;
}

Matrix softmax_probabilities(const LinearModel& model, const Matrix& x) {
  if (x.cols != model.dim) throw InvalidInputError("probe: dimension mismatch");
  const int k = model.n_classes;
  Matrix probs(x.rows, static_cast<std::size_t>(k));
  std::vector<double> logits(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < x.rows; ++i) {
    compute_logits(model.weights, model.bias, x.row(i), logits.data());
    row_probabilities(logits.data(), k, probs.row(i));
  }
  return probs;
}

std::vector<int> predict(const LinearModel& model, const Matrix& x) {
  if (x.cols != model.dim) throw InvalidInputError("probe: dimension mismatch");
  const int k = model.n_classes;
  std::vector<int> labels(x.rows);
  std::vector<double> logits(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < x.rows; ++i) {
    compute_logits(model.weights, model.bias, x.row(i), logits.data());
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (logits[static_cast<std::size_t>(c)] > logits[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    labels[i] = best;
  }
  return labels;
}

LinearModel train_probe(const Matrix& x, const std::vector<int>& y, int epochs,
                        double learning_rate, double l2) {
  check_dataset(x, y);
  if (epochs < 1) throw InvalidConfigError("probe: need at least 1 epoch");
  if (!(learning_rate > 0.0)) throw InvalidConfigError("probe: learning rate must be positive");
  if (l2 < 0.0) throw InvalidConfigError("probe: l2 must be nonnegative");
  LinearModel model;
  model.n_classes = infer_classes(y);
  model.dim = x.cols;
  model.l2 = l2;
  model.weights = Matrix(static_cast<std::size_t>(model.n_classes), x.cols, 0.0);
  model.bias.assign(static_cast<std::size_t>(model.n_classes), 0.0);
  model.training_log.reserve(static_cast<std::size_t>(epochs));
  Matrix grad_w;
  std::vector<double> grad_b;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double loss = softmax_loss(model.weights, model.bias, x, y, l2);
    softmax_loss_gradient(model.weights, model.bias, x, y, l2, &grad_w, &grad_b);
    double grad_norm_sq = 0.0;
    for (double g : grad_w.data) grad_norm_sq += g * g;
    for (double g : grad_b) grad_norm_sq += g * g;
    if (grad_norm_sq == 0.0) {
      model.training_log.push_back(loss);
      break;  // stationary point
    }
    double step = learning_rate;
    bool accepted = false;
    Matrix candidate_w = model.weights;
    std::vector<double> candidate_b = model.bias;
    for (int attempt = 0; attempt < kMaxBacktracks; ++attempt) {
      for (std::size_t i = 0; i < candidate_w.data.size(); ++i) {
        candidate_w.data[i] = model.weights.data[i] - step * grad_w.data[i];
      }
      for (std::size_t i = 0; i < candidate_b.size(); ++i) {
        candidate_b[i] = model.bias[i] - step * grad_b[i];
      }
      const double candidate_loss =
          softmax_loss(candidate_w, candidate_b, x, y, l2);
      if (candidate_loss <= loss - kArmijoSlope * step * grad_norm_sq) {
        model.weights = candidate_w;
        model.bias = candidate_b;
        model.training_log.push_back(candidate_loss);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No step passed the decrease test: parameters are at numerical
      // convergence, keep them and stop.
      model.training_log.push_back(loss);
      break;
    }
  }
  return model;
}

ProbeReport evaluate(const LinearModel& model, const Matrix& x,
                     const std::vector<int>& y) {
  check_dataset(x, y);
  if (x.cols != model.dim) throw InvalidInputError("probe: dimension mismatch");
  for (int label : y) {
    if (label >= model.n_classes) {
      throw InvalidInputError("probe: label outside model classes");
    }
  }
  const std::vector<int> predicted = predict(model, x);
  const auto k = static_cast<std::size_t>(model.n_classes);
  ProbeReport report;
  report.confusion = Matrix(k, k, 0.0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    report.confusion(static_cast<std::size_t>(y[i]),
                     static_cast<std::size_t>(predicted[i])) += 1.0;
    if (predicted[i] == y[i]) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(x.rows);
  report.per_class_accuracy.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    double row_total = 0.0;
    for (std::size_t p = 0; p < k; ++p) row_total += report.confusion(c, p);
    if (row_total > 0.0) {
      report.per_class_accuracy[c] = report.confusion(c, c) / row_total;
    }
  }
  return report;
}

Baselines baselines(const std::vector<int>& y) {
  if (y.empty()) throw InvalidInputError("baselines: empty label vector");
  for (int label : y) {
    if (label < 0) throw InvalidInputError("baselines: negative label");
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(infer_classes(y)), 0);
  for (int label : y) ++counts[static_cast<std::size_t>(label)];
  std::size_t distinct = 0;
  std::size_t modal_count = 0;
  int modal_class = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    ++distinct;
    if (counts[c] > modal_count) {
      modal_count = counts[c];
      modal_class = static_cast<int>(c);
    }
  }
  Baselines b;
  b.chance = 1.0 / static_cast<double>(distinct);
  b.majority = static_cast<double>(modal_count) / static_cast<double>(y.size());
  b.majority_class = modal_class;
  return b;
}

}  // namespace soundtex
