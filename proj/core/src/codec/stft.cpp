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

#include "texvib/codec/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "texvib/codec/fft.hpp"
#include "texvib/error.hpp"

namespace texvib::codec {

std::vector<double> hamming_window(int size) {
  std::vector<double> w(static_cast<std::size_t>(size));
  for (int n = 0; n < size; ++n) {
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / size);
  }
  return w;
}

int frame_count(std::size_t length, const CodecConfig& cfg) {
  if (length < static_cast<std::size_t>(cfg.fft_size)) return 0;
  return static_cast<int>((length - cfg.fft_size) / cfg.hop) + 1;
}

std::size_t synthesis_length(int frames, const CodecConfig& cfg) {
  if (frames <= 0) return 0;
  return static_cast<std::size_t>(frames - 1) * cfg.hop + cfg.fft_size;
}

std::pair<std::size_t, std::size_t> interior_range(int frames, const CodecConfig& cfg) {
  const std::size_t begin = static_cast<std::size_t>(cfg.fft_size - cfg.hop);
  const std::size_t end = static_cast<std::size_t>(frames) * cfg.hop;
  if (end <= begin) return {0, 0};
  return {begin, end};
}

ComplexSpectrogram stft(const Waveform& wave, const CodecConfig& cfg) {
  cfg.validate();
  if (wave.sample_rate_hz != cfg.sample_rate_hz) {
    fail(ErrorCode::kMismatch, "stft: waveform sample rate " + std::to_string(wave.sample_rate_hz) +
                                   " Hz differs from codec rate " +
                                   std::to_string(cfg.sample_rate_hz) + " Hz");
  }
  if (wave.samples.size() < static_cast<std::size_t>(cfg.fft_size)) {
    fail(ErrorCode::kDimension, "stft: signal length " + std::to_string(wave.samples.size()) +
                                    " is shorter than one window (" +
                                    std::to_string(cfg.fft_size) + " samples)");
  }
  const int frames = frame_count(wave.samples.size(), cfg);
  const std::vector<double> window = hamming_window(cfg.fft_size);
  const RealFft fft(cfg.fft_size);

  ComplexSpectrogram out;
  out.config = cfg;
  out.data.resize(cfg.num_bins(), frames);
  std::vector<double> segment(static_cast<std::size_t>(cfg.fft_size));
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(cfg.num_bins()));
  for (int t = 0; t < frames; ++t) {
    const double* src = wave.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
    for (int n = 0; n < cfg.fft_size; ++n) segment[n] = src[n] * window[n];
    fft.forward(segment, bins);
    for (int k = 0; k < cfg.num_bins(); ++k) out.data(k, t) = bins[k];
  }
  return out;
}

Waveform istft(const ComplexSpectrogram& spec, const CodecConfig& cfg) {
  cfg.validate();
  if (spec.data.rows() != cfg.num_bins()) {
    fail(ErrorCode::kDimension, "istft: spectrogram has " + std::to_string(spec.data.rows()) +
                                    " bins, codec expects " + std::to_string(cfg.num_bins()));
  }
  const int frames = static_cast<int>(spec.data.cols());
  Waveform out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  if (frames == 0) return out;

  const std::vector<double> window = hamming_window(cfg.fft_size);
  const RealFft fft(cfg.fft_size);
  const std::size_t length = synthesis_length(frames, cfg);
  std::vector<double> acc(length, 0.0);
  std::vector<double> norm(length, 0.0);
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(cfg.num_bins()));
  std::vector<double> segment(static_cast<std::size_t>(cfg.fft_size));

  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < cfg.num_bins(); ++k) bins[k] = spec.data(k, t);
    fft.inverse(bins, segment);
    const std::size_t offset = static_cast<std::size_t>(t) * cfg.hop;
    for (int n = 0; n < cfg.fft_size; ++n) {
      acc[offset + n] += window[n] * segment[n];
      norm[offset + n] += window[n] * window[n];
    }
  }
  out.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    if (!(norm[i] > 1e-12)) {
      fail(ErrorCode::kInternal, "istft: zero window energy at sample " + std::to_string(i));
    }
    out.samples[i] = acc[i] / norm[i];
  }
  return out;
}

}  // namespace texvib::codec
