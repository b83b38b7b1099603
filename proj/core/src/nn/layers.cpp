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

#include "texvib/nn/layers.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "texvib/error.hpp"
#include "texvib/nn/kernels.hpp"

namespace texvib::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<RowMat<T>> as_matrix(Tensor<T>& t, std::int64_t rows, std::int64_t cols) {
  return {t.data(), rows, cols};
}

template <typename T>
Eigen::Map<const RowMat<T>> as_matrix(const Tensor<T>& t, std::int64_t rows, std::int64_t cols) {
  return {t.data(), rows, cols};
}

template <typename T>
Parameter<T> make_param(Shape shape, T fill, bool trainable = true) {
  Parameter<T> p;
  p.value = Tensor<T>(shape, fill);
  p.grad = Tensor<T>(std::move(shape));
  p.trainable = trainable;
  return p;
}

template <typename T>
void kaiming(Parameter<T>& p, std::int64_t fan_in, util::Rng& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (auto& v : p.value.values()) v = static_cast<T>(dist(rng));
}

void require_rank(const Shape& shape, std::size_t rank, const std::string& what) {
  if (shape.size() != rank) {
    fail(ErrorCode::kDimension, what + " expects a rank-" + std::to_string(rank) + " input, got " +
                                    shape_str(shape));
  }
}

template <typename T>
void require_cached(const Tensor<T>& cache, const std::string& what) {
  if (cache.empty()) fail(ErrorCode::kInternal, what + ": backward called without forward");
}

// Channel layout of an (N, C) or (N, C, H, W) tensor.
struct ChannelLayout {
  std::int64_t batch, channels, inner;
};

ChannelLayout channel_layout(const Shape& s, std::int64_t channels) {
  if (s.size() != 2 && s.size() != 4) {
    fail(ErrorCode::kDimension, "batch_norm expects (N, C) or (N, C, H, W), got " + shape_str(s));
  }
  if (s[1] != channels) {
    fail(ErrorCode::kDimension, "batch_norm expects " + std::to_string(channels) +
                                    " channels, got " + shape_str(s));
  }
  return {s[0], s[1], s.size() == 4 ? s[2] * s[3] : 1};
}

}  // namespace

template <typename T>
Tensor<T> Layer<T>::propagate_tangent(const Tensor<T>&, const Tensor<T>*) {
  fail(ErrorCode::kInternal, describe() + " does not support tangent propagation");
}

template <typename T>
std::vector<NamedParameter<T>> parameters(Layer<T>& layer) {
  std::vector<NamedParameter<T>> out;
  layer.collect_parameters("", out);
  return out;
}

template <typename T>
void zero_grad(Layer<T>& layer) {
  for (auto& p : parameters(layer)) p.param->grad.fill(T(0));
}

template <typename T>
std::int64_t parameter_count(Layer<T>& layer, bool trainable_only) {
  std::int64_t n = 0;
  for (auto& p : parameters(layer)) {
    if (!trainable_only || p.param->trainable) n += p.param->value.size();
  }
  return n;
}

template <typename T>
std::vector<LayerSpec> specs(const Layer<T>& layer) {
  std::vector<LayerSpec> out;
  layer.append_specs(out);
  return out;
}

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(std::int64_t in, std::int64_t out)
    : in_(in),
      out_(out),
      weight_(make_param<T>({out, in}, T(0))),
      bias_(make_param<T>({out}, T(0))) {
  LayerSpec::dense(in, out).validate();
}

template <typename T>
Tensor<T> Dense<T>::infer(const Tensor<T>& x) const {
  require_rank(x.shape(), 2, describe());
  return dense(x, weight_.value, &bias_.value);
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& dy, ParamGrads mode) {
  require_cached(input_, describe());
  const std::int64_t n = input_.dim(0);
  require_shape(dy.shape(), {n, out_}, describe() + " gradient");
  auto g = as_matrix(dy, n, out_);
  auto w = as_matrix(weight_.value, out_, in_);
  Tensor<T> dx({n, in_});
  as_matrix(dx, n, in_).noalias() = g * w;
  if (mode == ParamGrads::kAccumulate) {
    as_matrix(weight_.grad, out_, in_).noalias() += g.transpose() * as_matrix(input_, n, in_);
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias_.grad.data(), out_) += g.colwise().sum();
  }
  return dx;
}

template <typename T>
Tensor<T> Dense<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>* adjoint_out) {
  require_rank(t.shape(), 2, describe());
  const std::int64_t n = t.dim(0);
  Tensor<T> out = dense(t, weight_.value, static_cast<const Tensor<T>*>(nullptr));
  if (adjoint_out != nullptr) {
    require_shape(adjoint_out->shape(), {n, out_}, describe() + " adjoint");
    as_matrix(weight_.grad, out_, in_).noalias() +=
        as_matrix(*adjoint_out, n, out_).transpose() * as_matrix(t, n, in_);
  }
  return out;
}

template <typename T>
void Dense<T>::collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) {
  out.push_back({prefix + "weight", &weight_});
  out.push_back({prefix + "bias", &bias_});
}

template <typename T>
void Dense<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::dense(in_, out_));
}

template <typename T>
void Dense<T>::initialize(util::Rng& rng) {
  kaiming(weight_, in_, rng);
  bias_.value.fill(T(0));
}

template <typename T>
std::string Dense<T>::describe() const {
  return "dense(" + std::to_string(in_) + "->" + std::to_string(out_) + ")";
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(std::int64_t in_channels, std::int64_t out_channels, std::int64_t kernel,
                  std::int64_t stride, std::int64_t pad)
    : spec_(LayerSpec::conv2d(in_channels, out_channels, kernel, stride, pad)),
      weight_(make_param<T>({out_channels, in_channels, kernel, kernel}, T(0))),
      bias_(make_param<T>({out_channels}, T(0))) {
  spec_.validate();
}

template <typename T>
Tensor<T> Conv2d<T>::infer(const Tensor<T>& x) const {
  return conv2d(x, weight_.value, &bias_.value, spec_.stride, spec_.pad);
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy, ParamGrads mode) {
  require_cached(input_, describe());
  if (mode == ParamGrads::kAccumulate) {
    conv2d_backward_params(input_, dy, spec_.stride, spec_.pad, weight_.grad, &bias_.grad);
  }
  return conv2d_backward_input(dy, weight_.value, input_.shape(), spec_.stride, spec_.pad);
}

template <typename T>
Tensor<T> Conv2d<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>* adjoint_out) {
  Tensor<T> out = conv2d(t, weight_.value, static_cast<const Tensor<T>*>(nullptr), spec_.stride,
                         spec_.pad);
  if (adjoint_out != nullptr) {
    require_shape(adjoint_out->shape(), out.shape(), describe() + " adjoint");
    conv2d_backward_params(t, *adjoint_out, spec_.stride, spec_.pad, weight_.grad,
                           static_cast<Tensor<T>*>(nullptr));
  }
  return out;
}

template <typename T>
void Conv2d<T>::collect_parameters(const std::string& prefix, std::vector<NamedParameter<T>>& out) {
  out.push_back({prefix + "weight", &weight_});
  out.push_back({prefix + "bias", &bias_});
}

template <typename T>
void Conv2d<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(spec_);
}

template <typename T>
void Conv2d<T>::initialize(util::Rng& rng) {
  kaiming(weight_, spec_.in_channels * spec_.kernel * spec_.kernel, rng);
  bias_.value.fill(T(0));
}

template <typename T>
std::string Conv2d<T>::describe() const {
  return "conv2d(" + std::to_string(spec_.in_channels) + "->" + std::to_string(spec_.out_channels) +
         ", k" + std::to_string(spec_.kernel) + " s" + std::to_string(spec_.stride) + " p" +
         std::to_string(spec_.pad) + ")";
}

// ---------------------------------------------------------------- BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(std::int64_t channels, double momentum, double epsilon)
    : channels_(channels),
      momentum_(momentum),
      epsilon_(epsilon),
      gamma_(make_param<T>({channels}, T(1))),
      beta_(make_param<T>({channels}, T(0))),
      running_mean_(make_param<T>({channels}, T(0), false)),
      running_var_(make_param<T>({channels}, T(1), false)) {
  LayerSpec::batch_norm(channels, momentum, epsilon).validate();
}

template <typename T>
Tensor<T> BatchNorm<T>::infer(const Tensor<T>& x) const {
  const auto [n, c, inner] = channel_layout(x.shape(), channels_);
  Tensor<T> y(x.shape());
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const T scale =
        gamma_.value[ch] / static_cast<T>(std::sqrt(static_cast<double>(running_var_.value[ch]) + epsilon_));
    const T shift = beta_.value[ch] - running_mean_.value[ch] * scale;
    for (std::int64_t b = 0; b < n; ++b) {
      const T* src = x.data() + (b * c + ch) * inner;
      T* dst = y.data() + (b * c + ch) * inner;
      for (std::int64_t i = 0; i < inner; ++i) dst[i] = src[i] * scale + shift;
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x) {
  const auto [n, c, inner] = channel_layout(x.shape(), channels_);
  if (n < 2) {
    fail(ErrorCode::kInvalidArgument, "batch_norm training needs a batch of at least 2, got " +
                                          std::to_string(n));
  }
  const std::int64_t count = n * inner;
  normalized_ = Tensor<T>(x.shape());
  inv_std_.assign(static_cast<std::size_t>(c), T(0));
  Tensor<T> y(x.shape());
  for (std::int64_t ch = 0; ch < c; ++ch) {
    double sum = 0.0;
    for (std::int64_t b = 0; b < n; ++b) {
      const T* src = x.data() + (b * c + ch) * inner;
      for (std::int64_t i = 0; i < inner; ++i) sum += src[i];
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (std::int64_t b = 0; b < n; ++b) {
      const T* src = x.data() + (b * c + ch) * inner;
      for (std::int64_t i = 0; i < inner; ++i) {
        const double d = src[i] - mean;
        sq += d * d;
      }
    }
    const double var = sq / static_cast<double>(count);
    const T inv = static_cast<T>(1.0 / std::sqrt(var + epsilon_));
    inv_std_[static_cast<std::size_t>(ch)] = inv;
    const T m = static_cast<T>(mean);
    for (std::int64_t b = 0; b < n; ++b) {
      const std::int64_t off = (b * c + ch) * inner;
      for (std::int64_t i = 0; i < inner; ++i) {
        const T xh = (x[off + i] - m) * inv;
        normalized_[off + i] = xh;
        y[off + i] = gamma_.value[ch] * xh + beta_.value[ch];
      }
    }
    const double unbiased = sq / static_cast<double>(count - 1);
    running_mean_.value[ch] =
        static_cast<T>((1.0 - momentum_) * running_mean_.value[ch] + momentum_ * mean);
    running_var_.value[ch] =
        static_cast<T>((1.0 - momentum_) * running_var_.value[ch] + momentum_ * unbiased);
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& dy, ParamGrads mode) {
  require_cached(normalized_, describe());
  require_shape(dy.shape(), normalized_.shape(), describe() + " gradient");
  const auto [n, c, inner] = channel_layout(dy.shape(), channels_);
  const double count = static_cast<double>(n * inner);
  Tensor<T> dx(dy.shape());
  for (std::int64_t ch = 0; ch < c; ++ch) {
    double sum_dy = 0.0, sum_dy_xh = 0.0;
    for (std::int64_t b = 0; b < n; ++b) {
      const std::int64_t off = (b * c + ch) * inner;
      for (std::int64_t i = 0; i < inner; ++i) {
        sum_dy += dy[off + i];
        sum_dy_xh += static_cast<double>(dy[off + i]) * normalized_[off + i];
      }
    }
    if (mode == ParamGrads::kAccumulate) {
      gamma_.grad[ch] += static_cast<T>(sum_dy_xh);
      beta_.grad[ch] += static_cast<T>(sum_dy);
    }
    const T k = gamma_.value[ch] * inv_std_[static_cast<std::size_t>(ch)];
    const T mean_dy = static_cast<T>(sum_dy / count);
    const T mean_dy_xh = static_cast<T>(sum_dy_xh / count);
    for (std::int64_t b = 0; b < n; ++b) {
      const std::int64_t off = (b * c + ch) * inner;
      for (std::int64_t i = 0; i < inner; ++i) {
        dx[off + i] = k * (dy[off + i] - mean_dy - normalized_[off + i] * mean_dy_xh);
      }
    }
  }
  return dx;
}

template <typename T>
void BatchNorm<T>::collect_parameters(const std::string& prefix,
                                      std::vector<NamedParameter<T>>& out) {
  out.push_back({prefix + "gamma", &gamma_});
  out.push_back({prefix + "beta", &beta_});
  out.push_back({prefix + "running_mean", &running_mean_});
  out.push_back({prefix + "running_var", &running_var_});
}

template <typename T>
void BatchNorm<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::batch_norm(channels_, momentum_, epsilon_));
}

template <typename T>
void BatchNorm<T>::initialize(util::Rng&) {
  gamma_.value.fill(T(1));
  beta_.value.fill(T(0));
  running_mean_.value.fill(T(0));
  running_var_.value.fill(T(1));
}

template <typename T>
std::string BatchNorm<T>::describe() const {
  return "batch_norm(" + std::to_string(channels_) + ")";
}

// ---------------------------------------------------------------- activations

template <typename T>
Tensor<T> LeakyRelu<T>::infer(const Tensor<T>& x) const {
  Tensor<T> y(x.shape());
  for (std::int64_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : slope_ * x[i];
  return y;
}

template <typename T>
Tensor<T> LeakyRelu<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return infer(x);
}

template <typename T>
Tensor<T> LeakyRelu<T>::backward(const Tensor<T>& dy, ParamGrads) {
  require_cached(input_, this->describe());
  require_shape(dy.shape(), input_.shape(), this->describe() + " gradient");
  Tensor<T> dx(dy.shape());
  for (std::int64_t i = 0; i < dy.size(); ++i) dx[i] = input_[i] > T(0) ? dy[i] : slope_ * dy[i];
  return dx;
}

template <typename T>
Tensor<T> LeakyRelu<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>*) {
  return backward(t, ParamGrads::kSkip);  // the Jacobian is a diagonal mask
}

template <typename T>
void LeakyRelu<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::leaky_relu(static_cast<double>(slope_)));
}

template <typename T>
std::string LeakyRelu<T>::describe() const {
  return "leaky_relu(" + std::to_string(static_cast<double>(slope_)) + ")";
}

template <typename T>
void Relu<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::relu());
}

template <typename T>
Tensor<T> Sigmoid<T>::infer(const Tensor<T>& x) const {
  Tensor<T> y(x.shape());
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const T v = x[i];
    if (v >= T(0)) {
      y[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      y[i] = e / (T(1) + e);
    }
  }
  return y;
}

template <typename T>
Tensor<T> Sigmoid<T>::forward(const Tensor<T>& x) {
  output_ = infer(x);
  return output_;
}

template <typename T>
Tensor<T> Sigmoid<T>::backward(const Tensor<T>& dy, ParamGrads) {
  require_cached(output_, describe());
  require_shape(dy.shape(), output_.shape(), "sigmoid gradient");
  Tensor<T> dx(dy.shape());
  for (std::int64_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * output_[i] * (T(1) - output_[i]);
  return dx;
}

template <typename T>
void Sigmoid<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::sigmoid());
}

template <typename T>
Tensor<T> Softmax<T>::infer(const Tensor<T>& x) const {
  require_rank(x.shape(), 2, "softmax");
  const std::int64_t n = x.dim(0), k = x.dim(1);
  Tensor<T> y(x.shape());
  for (std::int64_t r = 0; r < n; ++r) {
    const T* src = x.data() + r * k;
    T* dst = y.data() + r * k;
    const T peak = *std::max_element(src, src + k);
    T sum = 0;
    for (std::int64_t i = 0; i < k; ++i) sum += dst[i] = std::exp(src[i] - peak);
    for (std::int64_t i = 0; i < k; ++i) dst[i] /= sum;
  }
  return y;
}

template <typename T>
Tensor<T> Softmax<T>::forward(const Tensor<T>& x) {
  output_ = infer(x);
  return output_;
}

template <typename T>
Tensor<T> Softmax<T>::backward(const Tensor<T>& dy, ParamGrads) {
  require_cached(output_, describe());
  require_shape(dy.shape(), output_.shape(), "softmax gradient");
  const std::int64_t n = dy.dim(0), k = dy.dim(1);
  Tensor<T> dx(dy.shape());
  for (std::int64_t r = 0; r < n; ++r) {
    T dot = 0;
    for (std::int64_t i = 0; i < k; ++i) dot += dy[r * k + i] * output_[r * k + i];
    for (std::int64_t i = 0; i < k; ++i) dx[r * k + i] = output_[r * k + i] * (dy[r * k + i] - dot);
  }
  return dx;
}

template <typename T>
void Softmax<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::softmax());
}

// ---------------------------------------------------------------- reshaping

template <typename T>
Tensor<T> PixelShuffle<T>::infer(const Tensor<T>& x) const {
  return pixel_shuffle(x, factor_);
}

template <typename T>
Tensor<T> PixelShuffle<T>::backward(const Tensor<T>& dy, ParamGrads) {
  return pixel_unshuffle(dy, factor_);
}

template <typename T>
Tensor<T> PixelShuffle<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>*) {
  return pixel_shuffle(t, factor_);
}

template <typename T>
void PixelShuffle<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::pixel_shuffle(factor_));
}

template <typename T>
std::string PixelShuffle<T>::describe() const {
  return "pixel_shuffle(" + std::to_string(factor_) + ")";
}

template <typename T>
Tensor<T> Reshape<T>::infer(const Tensor<T>& x) const {
  if (x.rank() < 1) fail(ErrorCode::kDimension, describe() + " expects a batched input");
  Shape target{x.dim(0)};
  target.insert(target.end(), shape_.begin(), shape_.end());
  return x.reshaped(std::move(target));
}

template <typename T>
Tensor<T> Reshape<T>::forward(const Tensor<T>& x) {
  input_shape_ = x.shape();
  return infer(x);
}

template <typename T>
Tensor<T> Reshape<T>::backward(const Tensor<T>& dy, ParamGrads) {
  if (input_shape_.empty()) fail(ErrorCode::kInternal, describe() + ": backward called without forward");
  return dy.reshaped(input_shape_);
}

template <typename T>
Tensor<T> Reshape<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>*) {
  return infer(t);
}

template <typename T>
void Reshape<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::reshape(shape_));
}

template <typename T>
std::string Reshape<T>::describe() const {
  return "reshape(" + shape_str(shape_) + ")";
}

template <typename T>
Tensor<T> Flatten<T>::infer(const Tensor<T>& x) const {
  if (x.rank() < 1) fail(ErrorCode::kDimension, "flatten expects a batched input");
  const std::int64_t n = x.dim(0);
  return x.reshaped({n, n == 0 ? 0 : x.size() / n});
}

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x) {
  input_shape_ = x.shape();
  return infer(x);
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& dy, ParamGrads) {
  if (input_shape_.empty()) fail(ErrorCode::kInternal, "flatten: backward called without forward");
  return dy.reshaped(input_shape_);
}

template <typename T>
Tensor<T> Flatten<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>*) {
  return infer(t);
}

template <typename T>
void Flatten<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::flatten());
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::infer(const Tensor<T>& x) const {
  require_rank(x.shape(), 4, "global_avg_pool");
  const std::int64_t nc = x.dim(0) * x.dim(1), inner = x.dim(2) * x.dim(3);
  Tensor<T> y({x.dim(0), x.dim(1)});
  for (std::int64_t i = 0; i < nc; ++i) {
    T sum = 0;
    for (std::int64_t j = 0; j < inner; ++j) sum += x[i * inner + j];
    y[i] = sum / static_cast<T>(inner);
  }
  return y;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::forward(const Tensor<T>& x) {
  input_shape_ = x.shape();
  return infer(x);
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::backward(const Tensor<T>& dy, ParamGrads) {
  if (input_shape_.empty()) {
    fail(ErrorCode::kInternal, "global_avg_pool: backward called without forward");
  }
  require_shape(dy.shape(), {input_shape_[0], input_shape_[1]}, "global_avg_pool gradient");
  const std::int64_t inner = input_shape_[2] * input_shape_[3];
  Tensor<T> dx(input_shape_);
  const T scale = T(1) / static_cast<T>(inner);
  for (std::int64_t i = 0; i < dy.size(); ++i) {
    std::fill_n(dx.data() + i * inner, inner, dy[i] * scale);
  }
  return dx;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>*) {
  return infer(t);
}

template <typename T>
void GlobalAvgPool<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(LayerSpec::global_avg_pool());
}

// ---------------------------------------------------------------- Sequential

template <typename T>
Sequential<T>& Sequential<T>::add(std::unique_ptr<Layer<T>> layer) {
  if (!layer) fail(ErrorCode::kInvalidArgument, "cannot add a null layer");
  layers_.push_back(std::move(layer));
  return *this;
}

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x) {
  adjoints_.clear();
  Tensor<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::infer(const Tensor<T>& x) const {
  Tensor<T> h = x;
  for (const auto& layer : layers_) h = layer->infer(h);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& dy, ParamGrads mode) {
  adjoints_.clear();
  if (mode == ParamGrads::kSkip) adjoints_.resize(layers_.size());
  Tensor<T> g = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (mode == ParamGrads::kSkip) adjoints_[i] = g;
    g = layers_[i]->backward(g, mode);
  }
  return g;
}

template <typename T>
bool Sequential<T>::supports_tangent() const {
  for (const auto& layer : layers_) {
    if (!layer->supports_tangent()) return false;
  }
  return true;
}

template <typename T>
Tensor<T> Sequential<T>::propagate_tangent(const Tensor<T>& t, const Tensor<T>* adjoint_out) {
  if (adjoint_out != nullptr && adjoints_.size() != layers_.size()) {
    fail(ErrorCode::kInternal,
         "sequential: tangent pass with adjoints requires a preceding backward(kSkip)");
  }
  Tensor<T> h = t;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i]->propagate_tangent(h, adjoint_out != nullptr ? &adjoints_[i] : nullptr);
  }
  return h;
}

template <typename T>
void Sequential<T>::collect_parameters(const std::string& prefix,
                                       std::vector<NamedParameter<T>>& out) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->collect_parameters(prefix + std::to_string(i) + ".", out);
  }
}

template <typename T>
void Sequential<T>::append_specs(std::vector<LayerSpec>& out) const {
  for (const auto& layer : layers_) layer->append_specs(out);
}

template <typename T>
void Sequential<T>::initialize(util::Rng& rng) {
  for (auto& layer : layers_) layer->initialize(rng);
}

template <typename T>
std::vector<Layer<T>*> Sequential<T>::children() {
  std::vector<Layer<T>*> out;
  for (auto& layer : layers_) out.push_back(layer.get());
  return out;
}

template <typename T>
std::string Sequential<T>::describe() const {
  return "sequential(" + std::to_string(layers_.size()) + " layers)";
}

// ---------------------------------------------------------------- ResidualBlock

template <typename T>
ResidualBlock<T>::ResidualBlock(std::int64_t in_channels, std::int64_t out_channels,
                                std::int64_t stride, double momentum, double epsilon)
    : spec_(LayerSpec::residual_block(in_channels, out_channels, stride)) {
  spec_.momentum = momentum;
  spec_.epsilon = epsilon;
  spec_.validate();
  body_.add(std::make_unique<Conv2d<T>>(in_channels, out_channels, 3, stride, 1));
  body_.add(std::make_unique<BatchNorm<T>>(out_channels, momentum, epsilon));
  body_.add(std::make_unique<Relu<T>>());
  body_.add(std::make_unique<Conv2d<T>>(out_channels, out_channels, 3, 1, 1));
  body_.add(std::make_unique<BatchNorm<T>>(out_channels, momentum, epsilon));
  if (in_channels != out_channels || stride != 1) {
    projection_ = std::make_unique<Conv2d<T>>(in_channels, out_channels, 1, stride, 0);
  }
}

template <typename T>
Tensor<T> ResidualBlock<T>::infer(const Tensor<T>& x) const {
  Tensor<T> y = body_.infer(x);
  const Tensor<T> skip = projection_ ? projection_->infer(x) : x;
  require_shape(skip.shape(), y.shape(), describe() + " skip path");
  for (std::int64_t i = 0; i < y.size(); ++i) y[i] = std::max(y[i] + skip[i], T(0));
  return y;
}

template <typename T>
Tensor<T> ResidualBlock<T>::forward(const Tensor<T>& x) {
  sum_ = body_.forward(x);
  const Tensor<T> skip = projection_ ? projection_->forward(x) : x;
  require_shape(skip.shape(), sum_.shape(), describe() + " skip path");
  Tensor<T> y(sum_.shape());
  for (std::int64_t i = 0; i < y.size(); ++i) {
    sum_[i] += skip[i];
    y[i] = std::max(sum_[i], T(0));
  }
  return y;
}

template <typename T>
Tensor<T> ResidualBlock<T>::backward(const Tensor<T>& dy, ParamGrads mode) {
  require_cached(sum_, describe());
  require_shape(dy.shape(), sum_.shape(), describe() + " gradient");
  Tensor<T> g(dy.shape());
  for (std::int64_t i = 0; i < dy.size(); ++i) g[i] = sum_[i] > T(0) ? dy[i] : T(0);
  Tensor<T> dx = body_.backward(g, mode);
  const Tensor<T> dskip = projection_ ? projection_->backward(g, mode) : g;
  for (std::int64_t i = 0; i < dx.size(); ++i) dx[i] += dskip[i];
  return dx;
}

template <typename T>
void ResidualBlock<T>::collect_parameters(const std::string& prefix,
                                          std::vector<NamedParameter<T>>& out) {
  body_.collect_parameters(prefix + "body.", out);
  if (projection_) projection_->collect_parameters(prefix + "proj.", out);
}

template <typename T>
void ResidualBlock<T>::append_specs(std::vector<LayerSpec>& out) const {
  out.push_back(spec_);
}

template <typename T>
void ResidualBlock<T>::initialize(util::Rng& rng) {
  body_.initialize(rng);
  if (projection_) projection_->initialize(rng);
}

template <typename T>
std::vector<Layer<T>*> ResidualBlock<T>::children() {
  std::vector<Layer<T>*> out = body_.children();
  if (projection_) out.push_back(projection_.get());
  return out;
}

template <typename T>
std::string ResidualBlock<T>::describe() const {
  return "residual_block(" + std::to_string(spec_.in_channels) + "->" +
         std::to_string(spec_.out_channels) + ", s" + std::to_string(spec_.stride) + ")";
}

// ---------------------------------------------------------------- factory

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& s) {
  s.validate();
  switch (s.kind) {
    case LayerKind::kDense:
      return std::make_unique<Dense<T>>(s.in_features, s.out_features);
    case LayerKind::kConv2d:
      return std::make_unique<Conv2d<T>>(s.in_channels, s.out_channels, s.kernel, s.stride, s.pad);
    case LayerKind::kBatchNorm:
      return std::make_unique<BatchNorm<T>>(s.in_channels, s.momentum, s.epsilon);
    case LayerKind::kLeakyRelu:
      return std::make_unique<LeakyRelu<T>>(s.slope);
    case LayerKind::kRelu:
      return std::make_unique<Relu<T>>();
    case LayerKind::kSigmoid:
      return std::make_unique<Sigmoid<T>>();
    case LayerKind::kSoftmax:
      return std::make_unique<Softmax<T>>();
    case LayerKind::kResidualBlock:
      return std::make_unique<ResidualBlock<T>>(s.in_channels, s.out_channels, s.stride, s.momentum,
                                                s.epsilon);
    case LayerKind::kPixelShuffle:
      return std::make_unique<PixelShuffle<T>>(s.factor);
    case LayerKind::kReshape:
      return std::make_unique<Reshape<T>>(s.shape);
    case LayerKind::kFlatten:
      return std::make_unique<Flatten<T>>();
    case LayerKind::kGlobalAvgPool:
      return std::make_unique<GlobalAvgPool<T>>();
  }
  fail(ErrorCode::kInternal, "unhandled layer kind");
}

template <typename T>
std::unique_ptr<Sequential<T>> make_sequential(const std::vector<LayerSpec>& layer_specs) {
  auto seq = std::make_unique<Sequential<T>>();
  for (const auto& s : layer_specs) seq->add(make_layer<T>(s));
  return seq;
}

#define TEXVIB_INSTANTIATE_LAYERS(T)                                                  \
  template class Layer<T>;                                                            \
  template class Dense<T>;                                                            \
  template class Conv2d<T>;                                                           \
  template class BatchNorm<T>;                                                        \
  template class LeakyRelu<T>;                                                        \
  template class Relu<T>;                                                             \
  template class Sigmoid<T>;                                                          \
  template class Softmax<T>;                                                          \
  template class PixelShuffle<T>;                                                     \
  template class Reshape<T>;                                                          \
  template class Flatten<T>;                                                          \
  template class GlobalAvgPool<T>;                                                    \
  template class Sequential<T>;                                                       \
  template class ResidualBlock<T>;                                                    \
  template std::vector<NamedParameter<T>> parameters(Layer<T>&);                      \
  template void zero_grad(Layer<T>&);                                                 \
  template std::int64_t parameter_count(Layer<T>&, bool);                             \
  template std::vector<LayerSpec> specs(const Layer<T>&);                             \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&);                 \
  template std::unique_ptr<Sequential<T>> make_sequential<T>(const std::vector<LayerSpec>&);

TEXVIB_INSTANTIATE_LAYERS(float)
TEXVIB_INSTANTIATE_LAYERS(double)

}  // namespace texvib::nn
