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

// Finite-difference checks over every layer kind, both losses and the
// composite networks (including the gradient-penalty parameter gradient).
// Shared by the `gradcheck` subcommand and the test suites.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "texvib/nn/grad_check.hpp"

namespace texvib::gan {

inline constexpr double kLayerTolerance = 1e-4;
inline constexpr double kCompositeTolerance = 1e-3;

struct GradientCase {
  std::string name;
  std::string group;  // "layer", "loss" or "composite"
  double tolerance = 0.0;
  nn::GradCheckReport report;

  bool passed() const { return report.failure.empty() && report.passed; }
};

/// Runs every case whose name contains `filter` (all when empty).
std::vector<GradientCase> run_gradient_suite(std::uint64_t seed, const std::string& filter = "");

}  // namespace texvib::gan
