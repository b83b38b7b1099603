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

#include "texvib/codec/griffin_lim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "texvib/codec/stft.hpp"
#include "texvib/error.hpp"

namespace texvib::codec {

namespace {

// mag * e^{i angle(spec)}; bins with |spec| == 0 take phase 0.
Eigen::MatrixXcd impose_magnitude(const MagnitudeMatrix& mag, const Eigen::MatrixXcd& spec) {
  Eigen::MatrixXcd out(mag.rows(), mag.cols());
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const std::complex<double> s = spec.data()[i];
    const double a = std::abs(s);
    out.data()[i] = a > 0.0 ? s * (mag.data()[i] / a) : std::complex<double>(mag.data()[i], 0.0);
  }
  return out;
}

}  // namespace

double spectral_convergence(const MagnitudeMatrix& mag, const Eigen::MatrixXcd& spec) {
  const double denom = mag.norm();
  if (denom == 0.0) return 0.0;
  return (mag - spec.cwiseAbs()).norm() / denom;
}

GriffinLimResult griffin_lim(const MagnitudeMatrix& mag, const CodecConfig& cfg, int iters,
                             std::uint64_t seed) {
  cfg.validate();
  if (iters < 1) fail(ErrorCode::kInvalidArgument, "griffin_lim: iters must be >= 1");
  if (mag.rows() != cfg.num_bins()) {
    fail(ErrorCode::kDimension, "griffin_lim: magnitude has " + std::to_string(mag.rows()) +
                                    " bins, codec expects " + std::to_string(cfg.num_bins()));
  }
  if (mag.cols() < 1) fail(ErrorCode::kDimension, "griffin_lim: magnitude has no frames");
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const double v = mag.data()[i];
    if (std::isnan(v) || !std::isfinite(v)) fail(ErrorCode::kNumeric, "griffin_lim: non-finite magnitude");
    if (v < 0.0) fail(ErrorCode::kInvalidArgument, "griffin_lim: negative magnitude");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  ComplexSpectrogram current;
  current.config = cfg;
  current.data.resize(mag.rows(), mag.cols());
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    current.data.data()[i] = std::polar(mag.data()[i], phase(rng));
  }

  GriffinLimResult result;
  result.errors.reserve(static_cast<std::size_t>(iters));
  Waveform x = istft(current, cfg);
  ComplexSpectrogram analysed = stft(x, cfg);
  for (int it = 0; it < iters; ++it) {
    current.data = impose_magnitude(mag, analysed.data);
    x = istft(current, cfg);
    analysed = stft(x, cfg);
    result.errors.push_back(spectral_convergence(mag, analysed.data));
  }
  result.wave = std::move(x);
  return result;
}

}  // namespace texvib::codec
