#pragma once

#include <cmath>
#include <vector>

#include "augbench/nn/layers.hpp"

namespace augbench::nn {

template <typename T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad;  // d(value)/d(input)
};

/// Mean binary cross-entropy on logits against a constant target.
template <typename T>
LossResult<T> bce_with_logits(const Tensor<T>& logits, T target) {
  LossResult<T> r;
  r.grad = Tensor<T>(logits.n, logits.c, logits.h, logits.w);
  const double count = static_cast<double>(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits.data[i];
    total += std::max(x, 0.0) - x * target + std::log1p(std::exp(-std::abs(x)));
    r.grad.data[i] = static_cast<T>((sigmoid(x) - target) / count);
  }
  r.value = total / count;
  return r;
}

/// Mean absolute error; subgradient 0 where prediction equals target.
template <typename T>
LossResult<T> l1_loss(const Tensor<T>& prediction, const Tensor<T>& target) {
  LossResult<T> r;
  r.grad = Tensor<T>(prediction.n, prediction.c, prediction.h, prediction.w);
  const double count = static_cast<double>(prediction.size());
  double total = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = static_cast<double>(prediction.data[i]) - target.data[i];
    total += std::abs(d);
    r.grad.data[i] = static_cast<T>((d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) / count);
  }
  r.value = total / count;
  return r;
}

/// Row-wise softmax of an (N, K, 1, 1) logit tensor.
template <typename T>
std::vector<std::vector<double>> softmax_rows(const Tensor<T>& logits) {
  std::vector<std::vector<double>> out(logits.n, std::vector<double>(logits.c));
  for (int i = 0; i < logits.n; ++i) {
    const T* z = logits.sample(i);
    double peak = z[0];
    for (int k = 1; k < logits.c; ++k) peak = std::max(peak, static_cast<double>(z[k]));
    double sum = 0.0;
    for (int k = 0; k < logits.c; ++k) {
      out[i][k] = std::exp(static_cast<double>(z[k]) - peak);
      sum += out[i][k];
    }
    for (auto& p : out[i]) p /= sum;
  }
  return out;
}

template <typename T>
struct CrossEntropyResult {
  double value = 0.0;
  Tensor<T> grad;
  std::vector<std::vector<double>> probabilities;
};

template <typename T>
CrossEntropyResult<T> softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  CrossEntropyResult<T> r;
  r.probabilities = softmax_rows(logits);
  r.grad = Tensor<T>(logits.n, logits.c, 1, 1);
  double total = 0.0;
  for (int i = 0; i < logits.n; ++i) {
    const auto& p = r.probabilities[i];
    total -= std::log(std::max(p[labels[i]], 1e-300));
    for (int k = 0; k < logits.c; ++k) {
      r.grad.at(i, k, 0, 0) = static_cast<T>((p[k] - (k == labels[i] ? 1.0 : 0.0)) / logits.n);
    }
  }
  r.value = total / logits.n;
  return r;
}

}  // namespace augbench::nn
