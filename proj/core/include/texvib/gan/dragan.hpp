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

// Gradient-norm penalty evaluated at noisy perturbations of real samples:
//   x_hat = x + scale * std(x) * u,  u ~ U[0, 1) per element
//   penalty = lambda * mean_n (||d logit_n / d x_hat_n|| - 1)^2
// The parameter gradient of the penalty is accumulated without higher-order
// autodiff: the trunk is piecewise linear, so d logit / d x_hat = J^T w is
// linear in each weight at a fixed activation pattern, and
// d<v, J^T w>/d(theta) follows from one tangent pass of v through the trunk
// against the adjoints cached by the input-gradient backward pass.

#pragma once

#include <cstdint>

#include "texvib/gan/networks.hpp"

namespace texvib::gan {

struct DraganResult {
  double penalty = 0.0;
  double mean_grad_norm = 0.0;
};

/// Adds d(penalty)/d(params) into the discriminator gradients when
/// `accumulate` is set. Requires a trunk made of tangent-capable layers.
template <typename T>
DraganResult dragan_penalty(Discriminator<T>& disc, const nn::Tensor<T>& real, double lambda,
                            double scale, std::uint64_t seed, bool accumulate);

}  // namespace texvib::gan
