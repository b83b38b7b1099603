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
#include <vector>

#include "texvib/codec/model_domain.hpp"
#include "texvib/codec/types.hpp"

namespace texvib::codec {

inline constexpr int kDefaultGriffinLimIters = 60;

struct GriffinLimResult {
  Waveform wave;
  /// errors[i] = ||mag - |STFT(x_{i+1})|||_F / ||mag||_F, where x_{i+1} is
  /// the estimate after the (i+1)-th projection. Non-increasing.
  std::vector<double> errors;
};

/// ||mag - |spec|||_F / ||mag||_F, or 0 when mag is identically zero.
double spectral_convergence(const MagnitudeMatrix& mag, const Eigen::MatrixXcd& spec);

/// Phase retrieval by alternating projections, starting from uniform random
/// phases drawn from `seed`.
GriffinLimResult griffin_lim(const MagnitudeMatrix& mag, const CodecConfig& cfg, int iters,
                             std::uint64_t seed);

}  // namespace texvib::codec
