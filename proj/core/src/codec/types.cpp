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

#include "texvib/codec/types.hpp"

#include <cmath>
#include <string>

#include "texvib/error.hpp"

namespace texvib::codec {

namespace {
constexpr double kResizeCutoffHz = 256.0;
}

int CodecConfig::crop_bins() const {
  if (freq_crop_mode == FreqCropMode::kLowBins) return model_freq_bins;
  return static_cast<int>(std::floor(kResizeCutoffHz / bin_hz())) + 1;
}

double CodecConfig::row_to_hz(double row) const {
  if (freq_crop_mode == FreqCropMode::kLowBins) return row * bin_hz();
  // Rows are an align-corners stretch of bins [0, crop_bins - 1].
  const double bins = crop_bins();
  return row * (bins - 1) / (model_freq_bins - 1) * bin_hz();
}

double CodecConfig::hz_to_row(double hz) const {
  if (freq_crop_mode == FreqCropMode::kLowBins) return hz / bin_hz();
  const double bins = crop_bins();
  return hz / bin_hz() * (model_freq_bins - 1) / (bins - 1);
}

void CodecConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::kInvalidArgument, "codec config: " + what);
  };
  require(sample_rate_hz > 0, "sample_rate_hz must be positive");
  require(fft_size > 0, "fft_size must be positive");
  require(hop > 0, "hop must be positive");
  require(hop <= fft_size, "hop must not exceed fft_size");
  require(model_freq_bins > 1, "model_freq_bins must be > 1");
  require(model_time_frames > 0, "model_time_frames must be positive");
  require(model_freq_bins <= num_bins(), "model_freq_bins exceeds fft_size/2 + 1");
  require(std::isfinite(log_floor_db) && log_floor_db < 0, "log_floor_db must be negative");
  require(crop_bins() >= 2 && crop_bins() <= num_bins(), "frequency crop out of range");
}

void Waveform::validate() const {
  if (samples.empty()) fail(ErrorCode::kInvalidArgument, "waveform is empty");
  if (sample_rate_hz <= 0) fail(ErrorCode::kInvalidArgument, "waveform sample rate must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      fail(ErrorCode::kNumeric, "waveform sample " + std::to_string(i) + " is not finite");
    }
  }
}

void NormStats::validate() const {
  if (!std::isfinite(log_min) || !std::isfinite(log_max)) {
    fail(ErrorCode::kInvalidArgument, "norm stats must be finite");
  }
  if (!(log_min < log_max)) {
    fail(ErrorCode::kInvalidArgument, "norm stats require log_min < log_max");
  }
}

void to_json(nlohmann::json& j, const CodecConfig& cfg) {
  j = nlohmann::json{
      {"sample_rate_hz", cfg.sample_rate_hz},
      {"fft_size", cfg.fft_size},
      {"window", "hamming"},
      {"hop", cfg.hop},
      {"model_freq_bins", cfg.model_freq_bins},
      {"model_time_frames", cfg.model_time_frames},
      {"log_floor_db", cfg.log_floor_db},
      {"freq_crop_mode",
       cfg.freq_crop_mode == FreqCropMode::kLowBins ? "low-128-bins" : "resize-to-256hz"},
  };
}

void from_json(const nlohmann::json& j, CodecConfig& cfg) {
  CodecConfig out;
  out.sample_rate_hz = j.value("sample_rate_hz", out.sample_rate_hz);
  out.fft_size = j.value("fft_size", out.fft_size);
  out.hop = j.value("hop", out.hop);
  out.model_freq_bins = j.value("model_freq_bins", out.model_freq_bins);
  out.model_time_frames = j.value("model_time_frames", out.model_time_frames);
  out.log_floor_db = j.value("log_floor_db", out.log_floor_db);
  const std::string window = j.value("window", std::string("hamming"));
  if (window != "hamming") fail(ErrorCode::kFormat, "unsupported window '" + window + "'");
  const std::string mode = j.value("freq_crop_mode", std::string("low-128-bins"));
  if (mode == "low-128-bins") {
    out.freq_crop_mode = FreqCropMode::kLowBins;
  } else if (mode == "resize-to-256hz") {
    out.freq_crop_mode = FreqCropMode::kResizeTo256Hz;
  } else {
    fail(ErrorCode::kFormat, "unknown freq_crop_mode '" + mode + "'");
  }
  cfg = out;
}

void to_json(nlohmann::json& j, const NormStats& stats) {
  j = nlohmann::json{{"log_min", stats.log_min}, {"log_max", stats.log_max}};
}

void from_json(const nlohmann::json& j, NormStats& stats) {
  stats.log_min = j.at("log_min").get<double>();
  stats.log_max = j.at("log_max").get<double>();
}

}  // namespace texvib::codec
