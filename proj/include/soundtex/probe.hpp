// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_PROBE_HPP_
#define SOUNDTEX_PROBE_HPP_

#include <cstddef>
#include <vector>

#include "soundtex/matrix.hpp"

namespace soundtex {

// Multinomial logistic regression trained by full-batch gradient
// descent with backtracking line search.
struct LinearModel {
  int n_classes = 0;
  std::size_t dim = 0;
  Matrix weights;             // n_classes x dim
  std::vector<double> bias;   // n_classes
  double l2 = 0.0;
  std::vector<double> training_log;  // loss after each epoch, nonincreasing
};

struct ProbeReport {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // 0 for classes absent from y
  Matrix confusion;                        // true class x predicted class
};

struct Baselines {
  double chance = 0.0;    // 1 / number of distinct observed classes
  double majority = 0.0;  // frequency of the modal class
  int majority_class = 0;
};

// Mean cross-entropy of y given x under (weights, bias), plus
// (l2 / 2) * ||weights||^2; the bias is never regularized.
double softmax_loss(const Matrix& weights, const std::vector<double>& bias,
                    const Matrix& x, const std::vector<int>& y, double l2);

// Analytic gradient of softmax_loss with respect to weights and bias.
void softmax_loss_gradient(const Matrix& weights, const std::vector<double>& bias,
                           const Matrix& x, const std::vector<int>& y, double l2,
                           Matrix* grad_weights, std::vector<double>* grad_bias);

// Row-wise class probabilities; each row sums to 1 within 1e-12.
Matrix softmax_probabilities(const LinearModel& model, const Matrix& x);

// Predicted class per row; ties in the logits pick the lowest class.
std::vector<int> predict(const LinearModel& model, const Matrix& x);

// Deterministic training from zero-initialized parameters. The step
// size starts at learning_rate each epoch and is halved until the
// Armijo sufficient-decrease test passes, so the training log never
// increases.
LinearModel train_probe(const Matrix& x, const std::vector<int>& y, int epochs,
                        double learning_rate = 1.0, double l2 = 1e-3);

ProbeReport evaluate(const LinearModel& model, const Matrix& x,
                     const std::vector<int>& y);

Baselines baselines(const std::vector<int>& y);

}  // namespace soundtex

#endif  // SOUNDTEX_PROBE_HPP_
