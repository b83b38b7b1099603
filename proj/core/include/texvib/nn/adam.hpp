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

#pragma once

#include <cstdint>
#include <vector>

#include "texvib/nn/layers.hpp"

namespace texvib::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over the trainable subset of `params`.
template <typename T>
class Adam {
 public:
  Adam(std::vector<NamedParameter<T>> params, AdamConfig config);

  /// Applies one update from the accumulated gradients. If any gradient is
  /// non-finite, throws kNumeric naming the parameter and leaves every
  /// parameter untouched.
  void step();
  void zero_grad();

  double learning_rate() const { return config_.learning_rate; }
  void set_learning_rate(double lr);
  std::int64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<NamedParameter<T>> params_;
  std::vector<std::vector<double>> m_, v_;
  AdamConfig config_;
  std::int64_t steps_ = 0;
};

}  // namespace texvib::nn
