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

#include "texvib/pipeline/signature.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "texvib/codec/fft.hpp"
#include "texvib/error.hpp"

namespace texvib::pipeline {

int dominant_row(const codec::ModelMatrix& m) {
  if (m.size() == 0) fail(ErrorCode::kDimension, "dominant_row: empty spectrogram");
  const Eigen::VectorXd rows = m.cast<double>().rowwise().mean();
  Eigen::Index best = 0;
  rows.maxCoeff(&best);
  return static_cast<int>(best);
}

codec::ModelMatrix mean_spectrogram(const std::vector<codec::ModelMatrix>& items) {
  if (items.empty()) fail(ErrorCode::kInvalidArgument, "mean_spectrogram: no items");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(items[0].rows(), items[0].cols());
  for (const auto& m : items) {
    if (m.rows() != acc.rows() || m.cols() != acc.cols()) {
      fail(ErrorCode::kDimension, "mean_spectrogram: inconsistent shapes");
    }
    acc += m.cast<double>();
  }
  return (acc / static_cast<double>(items.size())).cast<float>();
}

double dominant_frequency_hz(const codec::Waveform& wave) {
  wave.validate();
  const int n = static_cast<int>(wave.samples.size());
  if (n < 2) fail(ErrorCode::kDimension, "dominant_frequency_hz: need at least 2 samples");
  codec::RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.num_bins());
  fft.forward(wave.samples, spec);
  std::size_t best = 1;
  double best_mag = -1.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double mag = std::norm(spec[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  return static_cast<double>(best) * wave.sample_rate_hz / n;
}

bool within_bins(double a_hz, double b_hz, const codec::CodecConfig& cfg, double tolerance_bins) {
  return std::abs(a_hz - b_hz) <= tolerance_bins * cfg.bin_hz();
}

int nearest_reference(double hz, const std::vector<double>& reference_hz) {
  if (reference_hz.empty()) fail(ErrorCode::kInvalidArgument, "nearest_reference: no references");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < reference_hz.size(); ++k) {
    const double d = std::abs(hz - reference_hz[k]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace texvib::pipeline
