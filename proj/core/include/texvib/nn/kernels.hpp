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

// Stateless numeric kernels. Layers in layers.hpp wrap these with parameter
// storage and activation caching. Instantiated for float and double.

#pragma once

#include "texvib/nn/tensor.hpp"

namespace texvib::nn {

struct Conv2dGeometry {
  std::int64_t batch = 0;
  std::int64_t in_channels = 0;
  std::int64_t in_h = 0;
  std::int64_t in_w = 0;
  std::int64_t out_channels = 0;
  std::int64_t kernel = 0;
  std::int64_t stride = 1;
  std::int64_t pad = 0;
  std::int64_t out_h = 0;
  std::int64_t out_w = 0;
};

/// Validates shapes and derives output extents floor((H + 2p - k) / s) + 1.
/// `weight_shape` is (C_out, C_in, k, k).
Conv2dGeometry conv2d_geometry(const Shape& input, const Shape& weight_shape, std::int64_t stride,
                               std::int64_t pad);

/// Cross-correlation. `bias` may be null.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias,
                 std::int64_t stride, std::int64_t pad);

/// d(input) for upstream gradient `grad_out`.
template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& grad_out, const Tensor<T>& weight,
                                const Shape& input_shape, std::int64_t stride, std::int64_t pad);

/// Accumulates d(weight) (and d(bias) when non-null).
template <typename T>
void conv2d_backward_params(const Tensor<T>& input, const Tensor<T>& grad_out, std::int64_t stride,
                            std::int64_t pad, Tensor<T>& grad_weight, Tensor<T>* grad_bias);

/// (N, C*r*r, H, W) -> (N, C, H*r, W*r) with
/// out[n][c][h*r + i][w*r + j] = in[n][c*r*r + i*r + j][h][w].
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& input, std::int64_t factor);

/// Exact inverse (and adjoint) of pixel_shuffle.
template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& input, std::int64_t factor);

/// y = x W^T + b for x (N, in), W (out, in). `bias` may be null.
template <typename T>
Tensor<T> dense(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias);

}  // namespace texvib::nn
