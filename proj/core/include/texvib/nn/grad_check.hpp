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

// Finite-difference verification of reverse-mode gradients. The scalar
// objective is a fixed random projection of the layer output, sum_i r_i y_i,
// so every output element contributes.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "texvib/nn/layers.hpp"

namespace texvib::nn {

struct GradCheckOptions {
  double step = 1e-4;  // central-difference half-width
  double tolerance = 1e-4;  // on the relative error
  std::uint64_t seed = 1;
  /// Entries sampled per tensor; 0 checks all of them.
  std::int64_t max_entries_per_tensor = 0;
  bool check_input = true;
};

struct GradCheckEntry {
  std::string tensor;  // parameter name, or "input"
  std::int64_t index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  bool passed = false;
  double max_rel_error = 0.0;
  std::int64_t checked = 0;
  GradCheckEntry worst;
  std::string failure;  // set when the check could not run (non-finite values)
};

struct GradTarget {
  std::string name;
  Tensor<double>* value;    // perturbed in place, restored afterwards
  Tensor<double> analytic;  // claimed d(objective)/d(value)
};

/// Central differences of `objective` against every target entry.
GradCheckReport check_targets(const std::function<double()>& objective,
                              const std::vector<GradTarget>& targets,
                              const GradCheckOptions& options = {});

/// Runs in training mode. Batch-norm running statistics are restored
/// afterwards.
GradCheckReport grad_check(Layer<double>& layer, const Tensor<double>& input,
                           const GradCheckOptions& options = {});

}  // namespace texvib::nn
