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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "test_support.hpp"
#include "texvib/codec/fft.hpp"
#include "texvib/codec/griffin_lim.hpp"
#include "texvib/codec/model_domain.hpp"
#include "texvib/codec/spc1.hpp"
#include "texvib/codec/stft.hpp"
#include "texvib/codec/wav.hpp"
#include "texvib/error.hpp"

namespace texvib::codec {
namespace {

using testing::random_wave;
using testing::TempDir;

// O(N^2) reference DFT.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / n;
      acc += x[t] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

TEST(Fft, MatchesNaiveDftForOddAndEvenSizes) {
  for (int n : {8, 15, 64, 100, 512}) {
    const auto w = random_wave(n, 3 + n);
    RealFft fft(n);
    std::vector<std::complex<double>> out(fft.num_bins());
    fft.forward(w.samples, out);
    const auto ref = naive_dft(w.samples);
    for (std::size_t k = 0; k < out.size(); ++k) {
      EXPECT_NEAR(std::abs(out[k] - ref[k]), 0.0, 1e-9 * n) << "n=" << n << " k=" << k;
    }
    std::vector<double> back(n);
    fft.inverse(out, back);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(back[i], w.samples[i], 1e-12);
  }
}

TEST(Stft, FramesMatchWindowedNaiveDft) {
  CodecConfig cfg;
  const auto w = random_wave(2048, 11);
  const auto spec = stft(w, cfg);
  ASSERT_EQ(spec.data.rows(), 257);
  ASSERT_EQ(spec.data.cols(), frame_count(2048, cfg));
  EXPECT_EQ(spec.data.cols(), 13);
  const auto window = hamming_window(cfg.fft_size);
  for (int t : {0, 5, 12}) {
    std::vector<double> seg(cfg.fft_size);
    for (int n = 0; n < cfg.fft_size; ++n) seg[n] = w.samples[t * cfg.hop + n] * window[n];
    const auto ref = naive_dft(seg);
    for (int k = 0; k < cfg.num_bins(); k += 17) {
      EXPECT_NEAR(std::abs(spec.data(k, t) - ref[k]), 0.0, 1e-8);
    }
  }
}

TEST(Stft, HammingWindowIsPeriodic) {
  const auto w = hamming_window(512);
  EXPECT_DOUBLE_EQ(w[0], 0.08);
  EXPECT_NEAR(w[256], 1.0, 1e-15);
  EXPECT_NEAR(w[1], w[511], 1e-15);
}

TEST(Stft, RoundTripInteriorIsExact) {
  CodecConfig cfg;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto w = random_wave(8192, seed);
    const auto spec = stft(w, cfg);
    const auto back = istft(spec, cfg);
    const int frames = static_cast<int>(spec.data.cols());
    ASSERT_EQ(back.samples.size(), synthesis_length(frames, cfg));
    const auto [b, e] = interior_range(frames, cfg);
    double num = 0.0, den = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      num += std::pow(back.samples[i] - w.samples[i], 2);
      den += w.samples[i] * w.samples[i];
    }
    EXPECT_LT(std::sqrt(num / den), 1e-6);
  }
}

TEST(Stft, RejectsShortSignalAndRateMismatch) {
  CodecConfig cfg;
  EXPECT_THROW(stft(random_wave(100, 1), cfg), Error);
  try {
    stft(random_wave(1000, 1, 8000), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
  }
}

TEST(Codec, DurationForDefaultCrop) {
  CodecConfig cfg;
  EXPECT_EQ(synthesis_length(128, cfg), 127u * 128u + 512u);
  EXPECT_NEAR(synthesis_length(128, cfg) / 10000.0, 1.6768, 1e-9);
}

TEST(ModelDomain, ValuesInUnitRangeAndInvertOnCrop) {
  CodecConfig cfg;
  const auto w = random_wave(40000, 5);
  const auto spec = stft(w, cfg);
  NormStats stats{-30.0, 50.0};
  const auto m = to_model_domain(spec, stats, cfg);
  ASSERT_EQ(m.data.rows(), 128);
  ASSERT_EQ(m.data.cols(), 128);
  EXPECT_GE(m.data.minCoeff(), 0.0f);
  EXPECT_LE(m.data.maxCoeff(), 1.0f);
  const auto mag = from_model_domain(m, cfg);
  ASSERT_EQ(mag.rows(), cfg.num_bins());
  for (int r = 0; r < 128; r += 9) {
    for (int t = 0; t < 128; t += 13) {
      const double db = 20 * std::log10(std::abs(spec.data(r, t)));
      if (db > stats.log_min + 0.1 && db < stats.log_max - 0.1) {
        // float32 storage of the normalized value limits the precision.
        EXPECT_NEAR(20 * std::log10(mag(r, t)), db, 1e-4);
      }
    }
  }
  for (int r = 128; r < cfg.num_bins(); ++r) EXPECT_EQ(mag(r, 0), 0.0);
}

TEST(ModelDomain, RejectsOutOfRangeEntries) {
  CodecConfig cfg;
  ModelSpectrogram m;
  m.stats = {-30.0, 50.0};
  m.data = ModelMatrix::Constant(128, 128, 0.5f);
  m.data(3, 4) = 1.5f;
  EXPECT_THROW(from_model_domain(m, cfg), Error);
}

TEST(GriffinLim, ErrorIsNonIncreasing) {
  CodecConfig cfg;
  util::Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    MagnitudeMatrix mag(cfg.num_bins(), 64);
    for (Eigen::Index i = 0; i < mag.size(); ++i) mag.data()[i] = u(rng);
    const auto gl = griffin_lim(mag, cfg, 60, 100 + trial);
    ASSERT_EQ(gl.errors.size(), 60u);
    for (std::size_t i = 1; i < gl.errors.size(); ++i) {
      EXPECT_LE(gl.errors[i], gl.errors[i - 1] + 1e-9);
    }
  }
}

TEST(GriffinLim, ReconstructsSinusoidPeak) {
  CodecConfig cfg;
  codec::Waveform w;
  w.samples.resize(20000);
  for (std::size_t t = 0; t < w.samples.size(); ++t) {
    w.samples[t] = std::sin(2 * std::numbers::pi * 200.0 * t / 10000.0);
  }
  const MagnitudeMatrix mag = stft(w, cfg).data.cwiseAbs();
  const auto gl = griffin_lim(mag, cfg, 60, 1);
  const MagnitudeMatrix rec = stft(gl.wave, cfg).data.cwiseAbs();
  Eigen::Index best = 0;
  rec.rowwise().sum().maxCoeff(&best);
  EXPECT_NEAR(static_cast<double>(best), 200.0 / cfg.bin_hz(), 1.0);
}

TEST(GriffinLim, DeterministicInSeed) {
  CodecConfig cfg;
  MagnitudeMatrix mag = MagnitudeMatrix::Constant(cfg.num_bins(), 16, 0.5);
  const auto a = griffin_lim(mag, cfg, 5, 3);
  const auto b = griffin_lim(mag, cfg, 5, 3);
  const auto c = griffin_lim(mag, cfg, 5, 4);
  EXPECT_EQ(a.wave.samples, b.wave.samples);
  EXPECT_NE(a.wave.samples, c.wave.samples);
}

TEST(Wav, RoundTripWithinQuantization) {
  TempDir dir;
  auto w = random_wave(5000, 2);
  write_wav(w, dir / "a.wav", NormStats{-10, 30}, CodecConfig{});
  const auto back = read_wav(dir / "a.wav");
  ASSERT_EQ(back.samples.size(), w.samples.size());
  EXPECT_EQ(back.sample_rate_hz, 10000);
  double peak = 0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    EXPECT_NEAR(back.samples[i], w.samples[i], peak / 32767.0);
  }
  EXPECT_TRUE(std::filesystem::exists(wav_sidecar_path(dir / "a.wav")));
}

TEST(Wav, EncodingIsDeterministicAndRejectsGarbage) {
  const auto w = random_wave(1000, 4);
  EXPECT_EQ(encode_wav(w).bytes, encode_wav(w).bytes);
  std::vector<std::uint8_t> junk{'R', 'I', 'F', 'F', 1, 2};
  EXPECT_THROW(decode_wav(junk), Error);
}

TEST(Spc1, RoundTripIsBitExact) {
  ModelSpectrogram m;
  m.stats = {-12.5, 40.25};
  m.data = ModelMatrix::Random(128, 128).cwiseAbs();
  const auto bytes = encode_spc1(m);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SPC1");
  const auto back = decode_spc1(bytes);
  EXPECT_EQ(back.data, m.data);
  EXPECT_EQ(back.stats, m.stats);
  EXPECT_EQ(back.config, m.config);
  auto truncated = bytes;
  truncated.resize(100);
  EXPECT_THROW(decode_spc1(truncated), Error);
}

TEST(CodecConfig, JsonRoundTripAndValidation) {
  CodecConfig cfg;
  cfg.freq_crop_mode = FreqCropMode::kResizeTo256Hz;
  const CodecConfig back = nlohmann::json(cfg).get<CodecConfig>();
  EXPECT_EQ(back, cfg);
  CodecConfig bad;
  bad.hop = 0;
  EXPECT_THROW(bad.validate(), Error);
}

}  // namespace
}  // namespace texvib::codec
