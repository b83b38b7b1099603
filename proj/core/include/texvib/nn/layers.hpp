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

// Layers with cached reverse-mode differentiation.
//
// A layer has two forward paths:
//   forward()  training pass; caches whatever backward() needs and, for
//              batch norm, uses batch statistics and updates running stats.
//   infer()    const, cache-free pass over frozen parameters; safe to call
//              concurrently.
//
// Piecewise-linear layers additionally support tangent propagation
// (Jacobian-vector products at the cached forward point). Together with the
// adjoints cached by Sequential::backward(..., ParamGrads::kSkip) this yields
// the parameter gradient of an input-gradient penalty without a general
// higher-order autodiff.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "texvib/nn/layer_spec.hpp"
#include "texvib/nn/tensor.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::nn {

enum class ParamGrads { kAccumulate, kSkip };

template <typename T>
struct Parameter {
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;  // false for batch-norm running statistics
};

template <typename T>
struct NamedParameter {
  std::string name;
  Parameter<T>* param;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  virtual Tensor<T> infer(const Tensor<T>& x) const = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out,
                             ParamGrads mode = ParamGrads::kAccumulate) = 0;

  virtual bool supports_tangent() const { return false; }

  /// Pushes `tangent_in` through the layer linearized at the cached forward
  /// point. When `adjoint_out` is non-null, also accumulates into the
  /// parameter gradients d<adjoint_out, tangent_out>/d(params), treating the
  /// activation pattern as fixed.
  virtual Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out);

  virtual void collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) {}
  virtual void append_specs(std::vector<LayerSpec>& out) const = 0;
  virtual void initialize(util::Rng& rng) {}
  virtual std::vector<Layer<T>*> children() { return {}; }
  virtual std::string describe() const = 0;
};

template <typename T>
std::vector<NamedParameter<T>> parameters(Layer<T>& layer);

template <typename T>
void zero_grad(Layer<T>& layer);

/// Number of scalar entries across (trainable or all) parameters.
template <typename T>
std::int64_t parameter_count(Layer<T>& layer, bool trainable_only = true);

template <typename T>
std::vector<LayerSpec> specs(const Layer<T>& layer);

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(std::int64_t in, std::int64_t out);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  void initialize(util::Rng& rng) override;
  std::string describe() const override;

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }

 private:
  std::int64_t in_, out_;
  Parameter<T> weight_, bias_;
  Tensor<T> input_;
};

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::int64_t in_channels, std::int64_t out_channels, std::int64_t kernel,
         std::int64_t stride, std::int64_t pad);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  void initialize(util::Rng& rng) override;
  std::string describe() const override;

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }

 private:
  LayerSpec spec_;
  Parameter<T> weight_, bias_;
  Tensor<T> input_;
};

/// Per-channel normalization over (N, H, W); also accepts (N, C).
template <typename T>
class BatchNorm final : public Layer<T> {
 public:
  explicit BatchNorm(std::int64_t channels, double momentum = 0.1, double epsilon = 1e-5);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  void collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  void initialize(util::Rng& rng) override;
  std::string describe() const override;

  Parameter<T>& gamma() { return gamma_; }
  Parameter<T>& beta() { return beta_; }
  const Parameter<T>& running_mean() const { return running_mean_; }
  const Parameter<T>& running_var() const { return running_var_; }

 private:
  std::int64_t channels_;
  double momentum_, epsilon_;
  Parameter<T> gamma_, beta_, running_mean_, running_var_;
  Tensor<T> normalized_;
  std::vector<T> inv_std_;
};

/// max(x, slope * x); slope 0 is a plain ReLU.
template <typename T>
class LeakyRelu : public Layer<T> {
 public:
  explicit LeakyRelu(double slope = 0.2) : slope_(static_cast<T>(slope)) {}

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override;

 protected:
  T slope_;
  Tensor<T> input_;
};

template <typename T>
class Relu final : public LeakyRelu<T> {
 public:
  Relu() : LeakyRelu<T>(0.0) {}
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override { return "relu"; }
};

template <typename T>
class Sigmoid final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override { return "sigmoid"; }

 private:
  Tensor<T> output_;
};

/// Row-wise softmax over the last axis of a (N, K) tensor.
template <typename T>
class Softmax final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override { return "softmax"; }

 private:
  Tensor<T> output_;
};

template <typename T>
class PixelShuffle final : public Layer<T> {
 public:
  explicit PixelShuffle(std::int64_t factor) : factor_(factor) {}

  Tensor<T> forward(const Tensor<T>& x) override { return infer(x); }
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override;

 private:
  std::int64_t factor_;
};

/// (N, ...) -> (N, shape...).
template <typename T>
class Reshape final : public Layer<T> {
 public:
  explicit Reshape(std::vector<std::int64_t> per_sample_shape) : shape_(std::move(per_sample_shape)) {}

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override;

 private:
  std::vector<std::int64_t> shape_;
  Shape input_shape_;
};

/// (N, ...) -> (N, prod(...)).
template <typename T>
class Flatten final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override { return "flatten"; }

 private:
  Shape input_shape_;
};

/// (N, C, H, W) -> (N, C).
template <typename T>
class GlobalAvgPool final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override { return true; }
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  std::string describe() const override { return "global_avg_pool"; }

 private:
  Shape input_shape_;
};

/// Ordered composition. Owns its children.
template <typename T>
class Sequential final : public Layer<T> {
 public:
  Sequential() = default;

  Sequential& add(std::unique_ptr<Layer<T>> layer);
  std::size_t size() const { return layers_.size(); }
  Layer<T>& at(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& at(std::size_t i) const { return *layers_.at(i); }

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  /// With ParamGrads::kSkip the adjoint at every child output is kept for a
  /// following propagate_tangent(..., adjoint_out).
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  bool supports_tangent() const override;
  Tensor<T> propagate_tangent(const Tensor<T>& tangent_in, const Tensor<T>* adjoint_out) override;
  void collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  void initialize(util::Rng& rng) override;
  std::vector<Layer<T>*> children() override;
  std::string describe() const override;

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<Tensor<T>> adjoints_;
};

/// relu(bn(conv3x3(relu(bn(conv3x3(x))))) + skip(x)); skip is identity, or a
/// strided 1x1 convolution when the shape changes.
template <typename T>
class ResidualBlock final : public Layer<T> {
 public:
  ResidualBlock(std::int64_t in_channels, std::int64_t out_channels, std::int64_t stride = 1,
                double momentum = 0.1, double epsilon = 1e-5);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  Tensor<T> backward(const Tensor<T>& grad_out, ParamGrads mode) override;
  void collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) override;
  void append_specs(std::vector<LayerSpec>& out) const override;
  void initialize(util::Rng& rng) override;
  std::vector<Layer<T>*> children() override;
  std::string describe() const override;

 private:
  LayerSpec spec_;
  Sequential<T> body_;
  std::unique_ptr<Conv2d<T>> projection_;
  Tensor<T> sum_;  // pre-activation of the final relu
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec);

template <typename T>
std::unique_ptr<Sequential<T>> make_sequential(const std::vector<LayerSpec>& specs);

}  // namespace texvib::nn
