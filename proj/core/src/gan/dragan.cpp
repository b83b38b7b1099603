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

#include "texvib/gan/dragan.hpp"

#include <cmath>
#include <random>
#include <string>

#include "texvib/error.hpp"

namespace texvib::gan {

template <typename T>
DraganResult dragan_penalty(Discriminator<T>& disc, const nn::Tensor<T>& real, double lambda,
                            double scale, std::uint64_t seed, bool accumulate) {
  if (!(lambda > 0) || !(scale > 0)) {
    fail(ErrorCode::kInvalidArgument, "dragan lambda and scale must be positive");
  }
  if (real.rank() < 2 || real.dim(0) < 1) {
    fail(ErrorCode::kDimension, "dragan needs a non-empty batch, got " + nn::shape_str(real.shape()));
  }
  if (!disc.trunk->supports_tangent() || !disc.adv->supports_tangent()) {
    fail(ErrorCode::kInternal, "dragan requires a piecewise-linear discriminator trunk");
  }

  double mean = 0.0;
  for (T v : real.values()) mean += v;
  mean /= static_cast<double>(real.size());
  double var = 0.0;
  for (T v : real.values()) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(real.size()));

  util::Rng rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  nn::Tensor<T> x_hat(real.shape());
  for (std::int64_t i = 0; i < real.size(); ++i) {
    x_hat[i] = static_cast<T>(real[i] + scale * sigma * uniform(rng));
  }

  const std::int64_t n = real.dim(0);
  const nn::Tensor<T> features = disc.trunk->forward(x_hat);
  const nn::Tensor<T> logit = disc.adv->forward(features);
  const nn::Tensor<T> ones(logit.shape(), T(1));
  const nn::Tensor<T> d_features = disc.adv->backward(ones, nn::ParamGrads::kSkip);
  const nn::Tensor<T> grad = disc.trunk->backward(d_features, nn::ParamGrads::kSkip);
  if (!grad.all_finite()) fail(ErrorCode::kNumeric, "dragan: non-finite input gradient");

  const std::int64_t per = grad.size() / n;
  std::vector<double> norms(static_cast<std::size_t>(n));
  DraganResult result;
  for (std::int64_t b = 0; b < n; ++b) {
    double sq = 0.0;
    for (std::int64_t i = 0; i < per; ++i) sq += static_cast<double>(grad[b * per + i]) * grad[b * per + i];
    const double norm = std::sqrt(sq);
    norms[static_cast<std::size_t>(b)] = norm;
    result.penalty += (norm - 1.0) * (norm - 1.0);
    result.mean_grad_norm += norm;
  }
  result.penalty *= lambda / static_cast<double>(n);
  result.mean_grad_norm /= static_cast<double>(n);
  if (!std::isfinite(result.penalty)) fail(ErrorCode::kNumeric, "dragan: non-finite penalty");

  if (accumulate) {
    // v = d(penalty) / d(grad)
    nn::Tensor<T> v(grad.shape());
    for (std::int64_t b = 0; b < n; ++b) {
      const double norm = norms[static_cast<std::size_t>(b)];
      if (norm == 0.0) continue;
      const double k = 2.0 * lambda / static_cast<double>(n) * (norm - 1.0) / norm;
      for (std::int64_t i = 0; i < per; ++i) v[b * per + i] = static_cast<T>(k * grad[b * per + i]);
    }
    const nn::Tensor<T> tangent = disc.trunk->propagate_tangent(v, &d_features);
    disc.adv->propagate_tangent(tangent, &ones);
  }
  return result;
}

template DraganResult dragan_penalty<float>(Discriminator<float>&, const nn::Tensor<float>&, double,
                                            double, std::uint64_t, bool);
template DraganResult dragan_penalty<double>(Discriminator<double>&, const nn::Tensor<double>&,
                                             double, double, std::uint64_t, bool);

}  // namespace texvib::gan
