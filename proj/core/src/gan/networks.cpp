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

#include "texvib/gan/networks.hpp"

#include <cmath>
#include <string>

#include "texvib/error.hpp"
#include "texvib/gan/label.hpp"

namespace texvib::gan {

using nn::LayerSpec;

void GeneratorConfig::validate() const {
  if (noise_dim < 1 || label_dim < 1) fail(ErrorCode::kInvalidArgument, "generator dims must be >= 1");
  if (base_channels < 1 || start_size < 1 || residual_blocks < 0) {
    fail(ErrorCode::kInvalidArgument, "generator trunk settings must be positive");
  }
  for (int c : upsample_channels) {
    if (c < 1) fail(ErrorCode::kInvalidArgument, "generator upsample channels must be positive");
  }
}

void DiscriminatorConfig::validate() const {
  if (label_dim < 1) fail(ErrorCode::kInvalidArgument, "discriminator label_dim must be >= 1");
  if (channels.empty()) fail(ErrorCode::kInvalidArgument, "discriminator needs at least one stage");
  for (int c : channels) {
    if (c < 1) fail(ErrorCode::kInvalidArgument, "discriminator channels must be positive");
  }
  if (input_size < 2 || (input_size >> channels.size()) < 1 ||
      (input_size % (1 << channels.size())) != 0) {
    fail(ErrorCode::kInvalidArgument, "discriminator input " + std::to_string(input_size) +
                                          " is not divisible by 2^" + std::to_string(channels.size()));
  }
  if (!(slope >= 0 && slope < 1)) fail(ErrorCode::kInvalidArgument, "discriminator slope out of range");
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = {{"noise_dim", c.noise_dim},           {"label_dim", c.label_dim},
       {"base_channels", c.base_channels},   {"start_size", c.start_size},
       {"residual_blocks", c.residual_blocks}, {"upsample_channels", c.upsample_channels}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  GeneratorConfig out;
  out.noise_dim = j.at("noise_dim").get<int>();
  out.label_dim = j.at("label_dim").get<int>();
  out.base_channels = j.at("base_channels").get<int>();
  out.start_size = j.at("start_size").get<int>();
  out.residual_blocks = j.at("residual_blocks").get<int>();
  out.upsample_channels = j.at("upsample_channels").get<std::vector<int>>();
  out.validate();
  c = out;
}

void to_json(nlohmann::json& j, const DiscriminatorConfig& c) {
  j = {{"input_size", c.input_size}, {"label_dim", c.label_dim}, {"channels", c.channels}, {"slope", c.slope}};
}

void from_json(const nlohmann::json& j, DiscriminatorConfig& c) {
  DiscriminatorConfig out;
  out.input_size = j.at("input_size").get<int>();
  out.label_dim = j.at("label_dim").get<int>();
  out.channels = j.at("channels").get<std::vector<int>>();
  out.slope = j.at("slope").get<double>();
  out.validate();
  c = out;
}

std::vector<LayerSpec> generator_specs(const GeneratorConfig& config) {
  config.validate();
  const std::int64_t base = config.base_channels, s = config.start_size;
  std::vector<LayerSpec> out;
  out.push_back(LayerSpec::dense(config.noise_dim + config.label_dim, base * s * s));
  out.push_back(LayerSpec::reshape({base, s, s}));
  out.push_back(LayerSpec::batch_norm(base));
  out.push_back(LayerSpec::relu());
  for (int i = 0; i < config.residual_blocks; ++i) {
    out.push_back(LayerSpec::residual_block(base, base, 1));
  }
  std::int64_t channels = base;
  for (int next : config.upsample_channels) {
    out.push_back(LayerSpec::conv2d(channels, 4 * next, 3, 1, 1));
    out.push_back(LayerSpec::pixel_shuffle(2));
    out.push_back(LayerSpec::relu());
    channels = next;
  }
  out.push_back(LayerSpec::conv2d(channels, 1, 3, 1, 1));
  out.push_back(LayerSpec::sigmoid());
  return out;
}

template <typename T>
std::unique_ptr<nn::Sequential<T>> build_generator(const GeneratorConfig& config) {
  return nn::make_sequential<T>(generator_specs(config));
}

nn::Tensor<float> generator_forward(const nn::Sequential<float>& generator,
                                    const nn::Tensor<float>& z, const nn::Tensor<float>& c) {
  validate_labels(c);
  return generator.infer(concat_features(z, c));
}

std::vector<LayerSpec> discriminator_trunk_specs(const DiscriminatorConfig& config) {
  config.validate();
  std::vector<LayerSpec> out;
  std::int64_t in = 1;
  for (int c : config.channels) {
    out.push_back(LayerSpec::conv2d(in, c, 3, 2, 1));
    out.push_back(LayerSpec::leaky_relu(config.slope));
    in = c;
  }
  out.push_back(LayerSpec::flatten());
  return out;
}

template <typename T>
Discriminator<T> build_discriminator(const DiscriminatorConfig& config) {
  Discriminator<T> d;
  d.trunk = nn::make_sequential<T>(discriminator_trunk_specs(config));
  const std::int64_t f = config.final_size();
  const std::int64_t features = config.channels.back() * f * f;
  d.adv = nn::make_sequential<T>({LayerSpec::dense(features, 1)});
  d.cls = nn::make_sequential<T>({LayerSpec::dense(features, config.label_dim)});
  return d;
}

template <typename T>
DiscriminatorOutput<T> Discriminator<T>::forward(const nn::Tensor<T>& x) {
  const nn::Tensor<T> features = trunk->forward(x);
  return {adv->forward(features), cls->forward(features)};
}

template <typename T>
DiscriminatorOutput<T> Discriminator<T>::infer(const nn::Tensor<T>& x) const {
  const nn::Tensor<T> features = trunk->infer(x);
  return {adv->infer(features), cls->infer(features)};
}

template <typename T>
nn::Tensor<T> Discriminator<T>::backward(const nn::Tensor<T>& d_adv, const nn::Tensor<T>& d_cls,
                                         nn::ParamGrads mode) {
  if (d_adv.empty() && d_cls.empty()) fail(ErrorCode::kInternal, "discriminator backward without gradient");
  nn::Tensor<T> d_features;
  if (!d_adv.empty()) d_features = adv->backward(d_adv, mode);
  if (!d_cls.empty()) {
    nn::Tensor<T> g = cls->backward(d_cls, mode);
    if (d_features.empty()) {
      d_features = std::move(g);
    } else {
      for (std::int64_t i = 0; i < g.size(); ++i) d_features[i] += g[i];
    }
  }
  return trunk->backward(d_features, mode);
}

template <typename T>
std::vector<nn::NamedParameter<T>> Discriminator<T>::parameters() {
  std::vector<nn::NamedParameter<T>> out;
  trunk->collect_parameters("trunk.", out);
  adv->collect_parameters("adv.", out);
  cls->collect_parameters("cls.", out);
  return out;
}

template <typename T>
void Discriminator<T>::zero_grad() {
  for (auto& p : parameters()) p.param->grad.fill(T(0));
}

template <typename T>
void Discriminator<T>::initialize(util::Rng& rng) {
  trunk->initialize(rng);
  adv->initialize(rng);
  cls->initialize(rng);
}

std::pair<nn::Tensor<float>, nn::Tensor<float>> discriminator_forward(
    const Discriminator<float>& disc, const nn::Tensor<float>& x) {
  for (float v : x.values()) {
    if (!(v >= -1e-6f && v <= 1.0f + 1e-6f)) {
      fail(ErrorCode::kInvalidArgument, "discriminator input outside [0, 1]: " + std::to_string(v));
    }
  }
  auto out = disc.infer(x);
  nn::Tensor<float> prob({out.adv_logit.dim(0)});
  for (std::int64_t i = 0; i < prob.size(); ++i) {
    const float z = out.adv_logit[i];
    prob[i] = z >= 0 ? 1.0f / (1.0f + std::exp(-z)) : std::exp(z) / (1.0f + std::exp(z));
  }
  return {std::move(prob), std::move(out.cls_logits)};
}

template std::unique_ptr<nn::Sequential<float>> build_generator<float>(const GeneratorConfig&);
template std::unique_ptr<nn::Sequential<double>> build_generator<double>(const GeneratorConfig&);
template struct Discriminator<float>;
template struct Discriminator<double>;
template Discriminator<float> build_discriminator<float>(const DiscriminatorConfig&);
template Discriminator<double> build_discriminator<double>(const DiscriminatorConfig&);

}  // namespace texvib::gan
