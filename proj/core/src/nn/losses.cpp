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

#include "texvib/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "texvib/error.hpp"

namespace texvib::nn {

namespace {

void require_logits(const Shape& s, const char* what) {
  if (s.size() != 2 || s[0] < 1 || s[1] < 1) {
    fail(ErrorCode::kDimension, std::string(what) + " expects (N, K) logits, got " + shape_str(s));
  }
}

// log-sum-exp of one row, and its softmax written to `p`.
template <typename T>
double softmax_row(const T* logits, std::int64_t k, double* p) {
  double peak = logits[0];
  for (std::int64_t i = 1; i < k; ++i) peak = std::max(peak, static_cast<double>(logits[i]));
  double sum = 0.0;
  for (std::int64_t i = 0; i < k; ++i) sum += p[i] = std::exp(logits[i] - peak);
  for (std::int64_t i = 0; i < k; ++i) p[i] /= sum;
  return peak + std::log(sum);
}

}  // namespace

template <typename T>
LossResult<T> bce(const Tensor<T>& prob, const Tensor<T>& target) {
  require_shape(target.shape(), prob.shape(), "bce target");
  if (prob.size() == 0) fail(ErrorCode::kDimension, "bce of an empty tensor");
  LossResult<T> r;
  r.grad = Tensor<T>(prob.shape());
  const double n = static_cast<double>(prob.size());
  double total = 0.0;
  for (std::int64_t i = 0; i < prob.size(); ++i) {
    const double p = std::clamp(static_cast<double>(prob[i]), kBceClamp, 1.0 - kBceClamp);
    const double y = target[i];
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    r.grad[i] = static_cast<T>((p - y) / (p * (1.0 - p)) / n);
  }
  r.value = total / n;
  return r;
}

template <typename T>
LossResult<T> bce_with_logits(const Tensor<T>& logits, const Tensor<T>& target) {
  require_shape(target.shape(), logits.shape(), "bce target");
  if (logits.size() == 0) fail(ErrorCode::kDimension, "bce of an empty tensor");
  LossResult<T> r;
  r.grad = Tensor<T>(logits.shape());
  const double n = static_cast<double>(logits.size());
  double total = 0.0;
  for (std::int64_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    const double y = target[i];
    // log(1 + e^-|z|) + max(z, 0) - z*y
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    r.grad[i] = static_cast<T>((p - y) / n);
  }
  r.value = total / n;
  return r;
}

template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  require_logits(logits.shape(), "cross_entropy");
  const std::int64_t n = logits.dim(0), k = logits.dim(1);
  if (static_cast<std::int64_t>(labels.size()) != n) {
    fail(ErrorCode::kDimension, "cross_entropy: " + std::to_string(labels.size()) +
                                    " labels for a batch of " + std::to_string(n));
  }
  LossResult<T> r;
  r.grad = Tensor<T>(logits.shape());
  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::int64_t row = 0; row < n; ++row) {
    const int label = labels[static_cast<std::size_t>(row)];
    if (label < 0 || label >= k) {
      fail(ErrorCode::kInvalidArgument, "cross_entropy: label " + std::to_string(label) +
                                            " outside [0, " + std::to_string(k) + ")");
    }
    const double lse = softmax_row(logits.data() + row * k, k, p.data());
    total += lse - logits[row * k + label];
    for (std::int64_t i = 0; i < k; ++i) {
      r.grad[row * k + i] = static_cast<T>((p[static_cast<std::size_t>(i)] - (i == label)) / n);
    }
  }
  r.value = total / static_cast<double>(n);
  return r;
}

template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const Tensor<T>& target) {
  require_logits(logits.shape(), "cross_entropy");
  require_shape(target.shape(), logits.shape(), "cross_entropy target");
  const std::int64_t n = logits.dim(0), k = logits.dim(1);
  LossResult<T> r;
  r.grad = Tensor<T>(logits.shape());
  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::int64_t row = 0; row < n; ++row) {
    const double lse = softmax_row(logits.data() + row * k, k, p.data());
    double mass = 0.0;
    for (std::int64_t i = 0; i < k; ++i) {
      const double y = target[row * k + i];
      mass += y;
      total += y * (lse - logits[row * k + i]);
    }
    for (std::int64_t i = 0; i < k; ++i) {
      r.grad[row * k + i] =
          static_cast<T>((mass * p[static_cast<std::size_t>(i)] - target[row * k + i]) / n);
    }
  }
  r.value = total / static_cast<double>(n);
  return r;
}

template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& x) {
  require_logits(x.shape(), "argmax_rows");
  const std::int64_t n = x.dim(0), k = x.dim(1);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (std::int64_t row = 0; row < n; ++row) {
    const T* r = x.data() + row * k;
    out[static_cast<std::size_t>(row)] = static_cast<int>(std::max_element(r, r + k) - r);
  }
  return out;
}

#define TEXVIB_INSTANTIATE_LOSSES(T)                                                 \
  template LossResult<T> bce(const Tensor<T>&, const Tensor<T>&);                    \
  template LossResult<T> bce_with_logits(const Tensor<T>&, const Tensor<T>&);        \
  template LossResult<T> cross_entropy(const Tensor<T>&, const std::vector<int>&);   \
  template LossResult<T> cross_entropy(const Tensor<T>&, const Tensor<T>&);          \
  template std::vector<int> argmax_rows(const Tensor<T>&);

TEXVIB_INSTANTIATE_LOSSES(float)
TEXVIB_INSTANTIATE_LOSSES(double)

}  // namespace texvib::nn
