#pragma once

#include <cmath>
#include <vector>

#include "augbench/error.hpp"
#include "augbench/nn/layers.hpp"

namespace augbench::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
class Adam {
 public:
  Adam(ParameterList<T> params, AdamOptions options) : params_(std::move(params)), opt_(options) {
    if (!(opt_.learning_rate > 0.0)) throw ConfigError("Adam learning rate must be > 0");
    if (opt_.beta1 < 0.0 || opt_.beta1 >= 1.0 || opt_.beta2 < 0.0 || opt_.beta2 >= 1.0) {
      throw ConfigError("Adam betas must lie in [0, 1)");
    }
    for (const auto* p : params_) {
      m_.emplace_back(p->value.size(), 0.0);
      v_.emplace_back(p->value.size(), 0.0);
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, t_);
    const double c2 = 1.0 - std::pow(opt_.beta2, t_);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& value = params_[k]->value.data;
      const auto& grad = params_[k]->grad.data;
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < value.size(); ++i) {
        const double g = grad[i];
        m[i] = opt_.beta1 * m[i] + (1.0 - opt_.beta1) * g;
        v[i] = opt_.beta2 * v[i] + (1.0 - opt_.beta2) * g * g;
        const double update = opt_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + opt_.eps);
        value[i] = static_cast<T>(value[i] - update);
      }
    }
  }

  long steps() const { return t_; }

 private:
  ParameterList<T> params_;
  AdamOptions opt_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long t_ = 0;
};

}  // namespace augbench::nn
