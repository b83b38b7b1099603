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

#include <Eigen/Core>
#include <complex>
#include <nlohmann/json.hpp>
#include <vector>

namespace texvib::codec {

enum class FreqCropMode {
  kLowBins,       // lowest model_freq_bins STFT bins, no resampling
  kResizeTo256Hz, // bins covering 0..256 Hz, bilinearly stretched to model_freq_bins rows
};

/// Analysis/synthesis parameters shared by every codec operation.
struct CodecConfig {
  int sample_rate_hz = 10000;
  int fft_size = 512;
  int hop = 128;
  int model_freq_bins = 128;
  int model_time_frames = 128;
  double log_floor_db = -80.0;
  FreqCropMode freq_crop_mode = FreqCropMode::kLowBins;

  int num_bins() const { return fft_size / 2 + 1; }
  double bin_hz() const { return static_cast<double>(sample_rate_hz) / fft_size; }

  /// Number of STFT bins that feed the model rows for the active crop mode.
  int crop_bins() const;

  /// Frequency (Hz) represented by model row `row`.
  double row_to_hz(double row) const;
  double hz_to_row(double hz) const;

  /// Throws kInvalidArgument when an invariant is violated.
  void validate() const;

  bool operator==(const CodecConfig&) const = default;
};

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 10000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  /// Non-empty and all finite.
  void validate() const;
};

/// One-sided STFT, rows = frequency bins (fft_size/2 + 1), cols = frames.
struct ComplexSpectrogram {
  Eigen::MatrixXcd data;
  CodecConfig config;
};

/// Global log-magnitude range used to map dB values onto [0, 1].
struct NormStats {
  double log_min = -80.0;
  double log_max = 0.0;

  void validate() const;
  bool operator==(const NormStats&) const = default;
};

using ModelMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// The generator's sample space: normalized log-amplitude, cropped block.
struct ModelSpectrogram {
  ModelMatrix data;
  NormStats stats;
  CodecConfig config;
};

void to_json(nlohmann::json& j, const CodecConfig& cfg);
void from_json(const nlohmann::json& j, CodecConfig& cfg);
void to_json(nlohmann::json& j, const NormStats& stats);
void from_json(const nlohmann::json& j, NormStats& stats);

}  // namespace texvib::codec
