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

// Generator and discriminator architectures.
//
// Generator: z ⊕ c -> dense -> (base, 8, 8) -> batch_norm -> relu
//            -> residual blocks -> 4x [conv3x3 to 4*C, pixel_shuffle 2, relu]
//            -> conv3x3 to 1 channel -> sigmoid.
// Discriminator: conv3x3/s2 + leaky_relu stages down to 4x4, flatten, and two
// dense heads: one real/fake logit and K class logits.

#pragma once

#include <memory>
#include <nlohmann/json.hpp>
#include <vector>

#include "texvib/nn/layers.hpp"

namespace texvib::gan {

struct GeneratorConfig {
  int noise_dim = 50;
  int label_dim = 9;
  int base_channels = 256;
  int start_size = 8;
  int residual_blocks = 3;
  /// Output channels of each x2 upsample stage; the stage convolution
  /// produces 4x this many.
  std::vector<int> upsample_channels{64, 32, 16, 8};

  int output_size() const { return start_size << upsample_channels.size(); }
  void validate() const;
  bool operator==(const GeneratorConfig&) const = default;
};

struct DiscriminatorConfig {
  int input_size = 128;
  int label_dim = 9;
  std::vector<int> channels{32, 64, 128, 256, 512};
  double slope = 0.2;

  int final_size() const { return input_size >> channels.size(); }
  void validate() const;
  bool operator==(const DiscriminatorConfig&) const = default;
};

void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);
void to_json(nlohmann::json& j, const DiscriminatorConfig& c);
void from_json(const nlohmann::json& j, DiscriminatorConfig& c);

std::vector<nn::LayerSpec> generator_specs(const GeneratorConfig& config);

template <typename T>
std::unique_ptr<nn::Sequential<T>> build_generator(const GeneratorConfig& config);

/// G(z, c) in inference mode. Labels must lie on the simplex.
nn::Tensor<float> generator_forward(const nn::Sequential<float>& generator,
                                    const nn::Tensor<float>& z, const nn::Tensor<float>& c);

template <typename T>
struct DiscriminatorOutput {
  nn::Tensor<T> adv_logit;   // (N, 1), pre-sigmoid
  nn::Tensor<T> cls_logits;  // (N, K)
};

template <typename T>
struct Discriminator {
  std::unique_ptr<nn::Sequential<T>> trunk;  // image -> flat features
  std::unique_ptr<nn::Sequential<T>> adv;    // features -> real/fake logit
  std::unique_ptr<nn::Sequential<T>> cls;    // features -> class logits

  /// Training pass; caches activations for backward().
  DiscriminatorOutput<T> forward(const nn::Tensor<T>& x);
  DiscriminatorOutput<T> infer(const nn::Tensor<T>& x) const;
  /// Either upstream gradient may be empty, meaning zero. Returns d(input).
  nn::Tensor<T> backward(const nn::Tensor<T>& d_adv, const nn::Tensor<T>& d_cls,
                         nn::ParamGrads mode);

  std::vector<nn::NamedParameter<T>> parameters();
  void zero_grad();
  void initialize(util::Rng& rng);
};

template <typename T>
Discriminator<T> build_discriminator(const DiscriminatorConfig& config);

std::vector<nn::LayerSpec> discriminator_trunk_specs(const DiscriminatorConfig& config);

/// Inference with the input-range check: returns (prob_real (N), class
/// logits (N, K)).
std::pair<nn::Tensor<float>, nn::Tensor<float>> discriminator_forward(
    const Discriminator<float>& disc, const nn::Tensor<float>& x);

}  // namespace texvib::gan
