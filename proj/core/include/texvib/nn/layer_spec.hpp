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
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace texvib::nn {

enum class LayerKind {
  kDense,
  kConv2d,
  kBatchNorm,
  kLeakyRelu,
  kRelu,
  kSigmoid,
  kSoftmax,
  kResidualBlock,
  kPixelShuffle,
  kReshape,
  kFlatten,
  kGlobalAvgPool,
};

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// Declarative description of one layer; checkpoints store a list of these
/// and rebuild the network from it. Only the fields relevant to `kind` are
/// meaningful.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::int64_t in_features = 0;   // dense
  std::int64_t out_features = 0;  // dense
  std::int64_t in_channels = 0;   // conv2d, batch_norm, residual_block
  std::int64_t out_channels = 0;  // conv2d, residual_block
  std::int64_t kernel = 0;        // conv2d
  std::int64_t stride = 1;        // conv2d, residual_block
  std::int64_t pad = 0;           // conv2d
  std::int64_t factor = 1;        // pixel_shuffle
  double slope = 0.2;             // leaky_relu
  double momentum = 0.1;          // batch_norm
  double epsilon = 1e-5;          // batch_norm
  std::vector<std::int64_t> shape;  // reshape: per-sample target shape

  /// Throws kInvalidArgument if a hyperparameter is out of range.
  void validate() const;

  bool operator==(const LayerSpec&) const = default;

  static LayerSpec dense(std::int64_t in, std::int64_t out);
  static LayerSpec conv2d(std::int64_t in, std::int64_t out, std::int64_t kernel,
                          std::int64_t stride, std::int64_t pad);
  static LayerSpec batch_norm(std::int64_t channels, double momentum = 0.1, double epsilon = 1e-5);
  static LayerSpec leaky_relu(double slope = 0.2);
  static LayerSpec relu();
  static LayerSpec sigmoid();
  static LayerSpec softmax();
  static LayerSpec residual_block(std::int64_t in, std::int64_t out, std::int64_t stride = 1);
  static LayerSpec pixel_shuffle(std::int64_t factor);
  static LayerSpec reshape(std::vector<std::int64_t> per_sample_shape);
  static LayerSpec flatten();
  static LayerSpec global_avg_pool();
};

void to_json(nlohmann::json& j, const LayerSpec& spec);
void from_json(const nlohmann::json& j, LayerSpec& spec);

}  // namespace texvib::nn
