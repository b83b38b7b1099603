// Copyright 2026 The texvib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "texvib/nn/adam.hpp"

#include <cmath>
#include <string>

#include "texvib/error.hpp"

namespace texvib::nn {

template <typename T>
Adam<T>::Adam(std::vector<NamedParameter<T>> params, AdamConfig config) : config_(config) {
  if (!(config.learning_rate > 0) || !(config.beta1 >= 0 && config.beta1 < 1) ||
      !(config.beta2 >= 0 && config.beta2 < 1) || !(config.epsilon > 0)) {
    fail(ErrorCode::kInvalidArgument, "adam: hyperparameters out of range");
  }
  for (auto& p : params) {
    if (!p.param->trainable) continue;
    m_.emplace_back(static_cast<std::size_t>(p.param->value.size()), 0.0);
    v_.emplace_back(static_cast<std::size_t>(p.param->value.size()), 0.0);
    params_.push_back(p);
  }
}

template <typename T>
void Adam<T>::set_learning_rate(double lr) {
  if (!(lr > 0)) fail(ErrorCode::kInvalidArgument, "adam: learning rate must be positive");
  config_.learning_rate = lr;
}

template <typename T>
void Adam<T>::step() {
  for (const auto& p : params_) {
    if (!p.param->grad.all_finite()) {
      fail(ErrorCode::kNumeric, "non-finite gradient in parameter '" + p.name + "'");
    }
  }
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& value = params_[k].param->value;
    const auto& grad = params_[k].param->grad;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double g = grad[static_cast<std::int64_t>(i)];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double update = lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
      value[static_cast<std::int64_t>(i)] -= static_cast<T>(update);
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.param->grad.fill(T(0));
}

template class Adam<float>;
template class Adam<double>;

}  // namespace texvib::nn
