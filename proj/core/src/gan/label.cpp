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

#include "texvib/gan/label.hpp"

#include <cmath>
#include <random>
#include <string>

#include "texvib/error.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::gan {

std::string simplex_violation(const std::vector<double>& label, double tolerance) {
  if (label.empty()) return "label vector is empty";
  double sum = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const double v = label[i];
    if (!std::isfinite(v)) return "entry " + std::to_string(i) + " is not finite";
    if (v < -tolerance) return "entry " + std::to_string(i) + " is negative (" + std::to_string(v) + ")";
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    return "entries sum to " + std::to_string(sum) + ", not 1";
  }
  return {};
}

void validate_labels(const nn::Tensor<float>& labels, double tolerance) {
  if (labels.rank() != 2) {
    fail(ErrorCode::kDimension, "label batch must be (N, K), got " + nn::shape_str(labels.shape()));
  }
  const std::int64_t n = labels.dim(0), k = labels.dim(1);
  std::vector<double> row(static_cast<std::size_t>(k));
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t i = 0; i < k; ++i) row[static_cast<std::size_t>(i)] = labels[r * k + i];
    const std::string why = simplex_violation(row, tolerance);
    if (!why.empty()) {
      fail(ErrorCode::kInvalidArgument, "label row " + std::to_string(r) + " is not on the simplex: " + why);
    }
  }
}

nn::Tensor<float> one_hot(const std::vector<int>& classes, int dim) {
  nn::Tensor<float> out({static_cast<std::int64_t>(classes.size()), dim});
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] < 0 || classes[i] >= dim) {
      fail(ErrorCode::kInvalidArgument,
           "class index " + std::to_string(classes[i]) + " outside [0, " + std::to_string(dim) + ")");
    }
    out[static_cast<std::int64_t>(i) * dim + classes[i]] = 1.0f;
  }
  return out;
}

nn::Tensor<float> label_batch(const std::vector<double>& label, int n) {
  const auto k = static_cast<std::int64_t>(label.size());
  nn::Tensor<float> out({n, k});
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t i = 0; i < k; ++i) out[r * k + i] = static_cast<float>(label[static_cast<std::size_t>(i)]);
  }
  return out;
}

nn::Tensor<float> sample_noise(int n, int dim, std::uint64_t seed) {
  if (n < 0 || dim < 1) fail(ErrorCode::kInvalidArgument, "noise batch needs n >= 0 and dim >= 1");
  util::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  nn::Tensor<float> out({n, dim});
  for (auto& v : out.values()) v = static_cast<float>(normal(rng));
  return out;
}

nn::Tensor<float> concat_features(const nn::Tensor<float>& z, const nn::Tensor<float>& c) {
  if (z.rank() != 2 || c.rank() != 2 || z.dim(0) != c.dim(0)) {
    fail(ErrorCode::kDimension, "noise " + nn::shape_str(z.shape()) + " and label " +
                                    nn::shape_str(c.shape()) + " batches do not agree");
  }
  const std::int64_t n = z.dim(0), dz = z.dim(1), dc = c.dim(1);
  nn::Tensor<float> out({n, dz + dc});
  for (std::int64_t r = 0; r < n; ++r) {
    std::copy_n(z.data() + r * dz, dz, out.data() + r * (dz + dc));
    std::copy_n(c.data() + r * dc, dc, out.data() + r * (dz + dc) + dz);
  }
  return out;
}

}  // namespace texvib::gan
