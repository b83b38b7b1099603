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
#include <string>
#include <vector>

#include "texvib/nn/tensor.hpp"

namespace texvib::gan {

inline constexpr int kDefaultLabelDim = 9;
inline constexpr int kDefaultNoiseDim = 50;
inline constexpr double kSimplexTolerance = 1e-5;

/// Throws kInvalidArgument unless every row of the (N, K) tensor is
/// nonnegative and sums to 1 within `tolerance`.
void validate_labels(const nn::Tensor<float>& labels, double tolerance = kSimplexTolerance);

/// Same check for a single vector; returns the offending reason or empty.
std::string simplex_violation(const std::vector<double>& label, double tolerance);

nn::Tensor<float> one_hot(const std::vector<int>& classes, int dim);
nn::Tensor<float> label_batch(const std::vector<double>& label, int n);

/// (n, dim) standard normal draws from a generator seeded with `seed`.
nn::Tensor<float> sample_noise(int n, int dim, std::uint64_t seed);

/// Concatenates z (N, Dz) and c (N, Dc) along the feature axis.
nn::Tensor<float> concat_features(const nn::Tensor<float>& z, const nn::Tensor<float>& c);

}  // namespace texvib::gan
