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

#include "texvib/nn/tensor.hpp"

namespace texvib::nn {

template <typename T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad;  // d(value) / d(input), same shape as the input
};

/// Probabilities are clamped to [1e-7, 1 - 1e-7] before the log.
inline constexpr double kBceClamp = 1e-7;

/// Mean binary cross-entropy between probabilities and targets of equal shape.
template <typename T>
LossResult<T> bce(const Tensor<T>& prob, const Tensor<T>& target);

/// Mean binary cross-entropy computed from logits; the gradient is
/// sigmoid(logit) - target scaled by 1/N. Stable for large |logit|.
template <typename T>
LossResult<T> bce_with_logits(const Tensor<T>& logits, const Tensor<T>& target);

/// Mean softmax cross-entropy of (N, K) logits against class indices.
template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels);

/// Mean softmax cross-entropy against (N, K) rows on the probability simplex
/// (soft or mixed labels).
template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const Tensor<T>& target);

/// Row-wise argmax of an (N, K) tensor.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& x);

}  // namespace texvib::nn
