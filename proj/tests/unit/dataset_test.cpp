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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "test_support.hpp"
#include "texvib/codec/stft.hpp"
#include "texvib/dataset/ingest.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"

namespace texvib::dataset {
namespace {

using testing::small_spec;
using testing::TempDir;

// Dominant bin of every frame, from a windowed O(N^2) DFT with no library
// FFT involved.
std::vector<int> brute_force_peak_bins(const codec::Waveform& w, int n_fft, int hop) {
  std::vector<double> window(n_fft);
  for (int n = 0; n < n_fft; ++n) window[n] = 0.54 - 0.46 * std::cos(2 * std::numbers::pi * n / n_fft);
  std::vector<int> peaks;
  for (std::size_t start = 0; start + n_fft <= w.samples.size(); start += hop) {
    int best = 1;
    double best_mag = -1;
    for (int k = 1; k <= n_fft / 2; ++k) {
      std::complex<double> acc = 0;
      for (int n = 0; n < n_fft; ++n) {
        acc += window[n] * w.samples[start + n] * std::polar(1.0, -2 * std::numbers::pi * k * n / n_fft);
      }
      if (std::abs(acc) > best_mag) {
        best_mag = std::abs(acc);
        best = k;
      }
    }
    peaks.push_back(best);
  }
  return peaks;
}

TEST(Synthetic, StandardSpecIsValid) {
  const auto spec = SyntheticSpec::standard();
  ASSERT_EQ(spec.classes.size(), 9u);
  EXPECT_NO_THROW(spec.validate());
  EXPECT_DOUBLE_EQ(spec.classes[0].center_hz, 200.0);
  std::set<std::string> names;
  for (const auto& c : spec.classes) names.insert(c.name);
  EXPECT_EQ(names.size(), 9u);
  EXPECT_THROW(SyntheticSpec::standard(1), Error);
  EXPECT_THROW(SyntheticSpec::standard(10), Error);
}

TEST(Synthetic, RejectsSignatureCollisions) {
  auto spec = SyntheticSpec::standard(3);
  spec.classes[1].center_hz = spec.classes[0].center_hz + spec.codec.bin_hz();
  EXPECT_THROW(spec.validate(), Error);
  spec = SyntheticSpec::standard(3);
  spec.classes[2].center_hz = 2600.0;  // beyond the 128-bin crop
  EXPECT_THROW(spec.validate(), Error);
  spec = SyntheticSpec::standard(3);
  spec.signal_length = 1000;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Synthetic, SpecJsonRoundTrip) {
  const auto spec = small_spec(3, 4);
  nlohmann::json j = spec;
  const auto back = j.get<SyntheticSpec>();
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(Synthetic, DatasetHasExpectedCountsAndIsDeterministic) {
  auto spec = small_spec(40);
  spec.image_width = 32;  // counts only; images are covered elsewhere
  spec.image_height = 32;
  spec.signal_length = 17000;
  const auto data = synthesize_dataset(spec, 7);
  EXPECT_EQ(data.size(), 360u);
  EXPECT_EQ(data.class_counts(), std::vector<int>(9, 40));
  EXPECT_NO_THROW(data.validate());

  const auto small = small_spec(2, 3);
  const auto a = synthesize_dataset(small, 3), b = synthesize_dataset(small, 3);
  const auto c = synthesize_dataset(small, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.samples[i].wave.samples, b.samples[i].wave.samples);
    EXPECT_EQ(*a.samples[i].image, *b.samples[i].image);
    EXPECT_EQ(a.samples[i].id, b.samples[i].id);
  }
  EXPECT_NE(a.samples[0].wave.samples, c.samples[0].wave.samples);
}

TEST(Synthetic, TwoHundredHertzClassPeaksInItsBin) {
  const auto spec = SyntheticSpec::standard();
  const double bin_hz = spec.codec.bin_hz();
  for (std::uint64_t seed : {1u, 2u}) {
    const auto wave = synthesize_signal(spec, 0, seed);
    const auto peaks = brute_force_peak_bins(wave, spec.codec.fft_size, spec.codec.hop);
    int hits = 0;
    for (int k : peaks) hits += std::abs(k * bin_hz - 200.0) <= bin_hz;
    EXPECT_GE(static_cast<double>(hits) / peaks.size(), 0.95) << "seed " << seed;
  }
}

// Each signal is assigned to the class whose band holds the most energy in
// its mean magnitude spectrum.
TEST(Synthetic, BandEnergySeparatesClasses) {
  auto spec = small_spec(12);
  spec.image_width = 16;
  spec.image_height = 16;
  const auto data = synthesize_dataset(spec, 11);
  int correct = 0;
  for (const auto& s : data.samples) {
    const auto S = codec::stft(s.wave, spec.codec);
    const Eigen::VectorXd mean = S.data.cwiseAbs().rowwise().mean();
    int best = -1;
    double best_e = -1;
    for (std::size_t k = 0; k < spec.classes.size(); ++k) {
      const int lo = static_cast<int>(std::floor((spec.classes[k].center_hz - 15) / spec.codec.bin_hz()));
      const int hi = static_cast<int>(std::ceil((spec.classes[k].center_hz + 15) / spec.codec.bin_hz()));
      const double e = mean.segment(lo, hi - lo + 1).squaredNorm();
      if (e > best_e) {
        best_e = e;
        best = static_cast<int>(k);
      }
    }
    correct += best == s.class_index;
  }
  EXPECT_GE(static_cast<double>(correct) / data.size(), 0.99);
}

TEST(Synthetic, ImagesAreEightBitAndSized) {
  const auto spec = small_spec(1, 3);
  const auto img = synthesize_image(spec, 2, 5);
  EXPECT_EQ(img.width, 160);
  EXPECT_EQ(img.height, 144);
  auto q = img;
  encoder::quantize_8bit(q);
  EXPECT_EQ(q, img);
}

Dataset tiny_dataset(int per_class = 5, int classes = 9) {
  auto spec = small_spec(per_class, classes);
  spec.image_width = 24;
  spec.image_height = 24;
  return synthesize_dataset(spec, 2);
}

TEST(Split, StratifiedEightyTwenty) {
  auto spec = small_spec(40);
  spec.image_width = 16;
  spec.image_height = 16;
  spec.signal_length = 17000;
  const auto data = synthesize_dataset(spec, 7);
  const auto s = split(data, 0.2, 7);
  EXPECT_EQ(s.train.size(), 288u);
  EXPECT_EQ(s.test.size(), 72u);
  EXPECT_EQ(s.train.class_counts(), std::vector<int>(9, 32));
  EXPECT_EQ(s.test.class_counts(), std::vector<int>(9, 8));

  std::set<std::string> train_keys, test_keys;
  for (const auto& x : s.train.samples) train_keys.insert(sample_key(x));
  for (const auto& x : s.test.samples) test_keys.insert(sample_key(x));
  std::set<std::string> all;
  for (const auto& x : data.samples) all.insert(sample_key(x));
  std::set<std::string> joined = train_keys;
  joined.insert(test_keys.begin(), test_keys.end());
  EXPECT_EQ(joined, all);
  for (const auto& k : test_keys) EXPECT_EQ(train_keys.count(k), 0u);

  const auto again = split(data, 0.2, 7);
  for (std::size_t i = 0; i < again.test.size(); ++i) {
    EXPECT_EQ(sample_key(again.test.samples[i]), sample_key(s.test.samples[i]));
  }
  std::vector<std::string> keys(test_keys.begin(), test_keys.end());
  const auto by_ids = split_by_ids(data, keys);
  EXPECT_EQ(by_ids.test.size(), 72u);
  EXPECT_THROW(split_by_ids(data, {"Glass/nope"}), Error);
}

TEST(Split, RejectsDegenerateInputs) {
  const auto data = tiny_dataset(3, 2);
  EXPECT_THROW(split(data, 0.0, 1), Error);
  EXPECT_THROW(split(data, 1.0, 1), Error);
  auto one = data;
  one.samples.erase(one.samples.begin() + 1, one.samples.begin() + 3);  // class 0 keeps one sample
  ASSERT_EQ(one.class_counts()[0], 1);
  EXPECT_THROW(split(one, 0.2, 1), Error);
}

TEST(NormStats, OrderInvariantAndReproducible) {
  const auto data = tiny_dataset(3, 3);
  const auto a = compute_norm_stats(data, data.codec);
  auto shuffled = data;
  std::reverse(shuffled.samples.begin(), shuffled.samples.end());
  const auto b = compute_norm_stats(shuffled, data.codec);
  EXPECT_EQ(a, b);
  EXPECT_EQ(compute_norm_stats(data, data.codec), a);
  EXPECT_LT(a.log_min, a.log_max);
  EXPECT_GE(a.log_min, a.log_max + data.codec.log_floor_db);
}

TEST(NormStats, IdenticalSignalsStillGiveARange) {
  auto data = tiny_dataset(2, 2);
  for (auto& s : data.samples) s.wave = data.samples[0].wave;
  const auto st = compute_norm_stats(data, data.codec);
  EXPECT_LT(st.log_min, st.log_max);
  Dataset empty;
  empty.class_names = data.class_names;
  EXPECT_THROW(compute_norm_stats(empty, data.codec), Error);
  for (auto& s : data.samples) std::fill(s.wave.samples.begin(), s.wave.samples.end(), 0.0);
  EXPECT_THROW(compute_norm_stats(data, data.codec), Error);
}

TEST(Ingest, WriteThenIngestRoundTrips) {
  TempDir dir;
  const auto data = tiny_dataset(3, 3);
  const auto stats = compute_norm_stats(data, data.codec);
  write_dataset(data, dir.path(), stats);
  const auto back = ingest(dir.path());
  EXPECT_EQ(back.class_names, data.class_names);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back.samples[i].id, data.samples[i].id);
    EXPECT_EQ(back.samples[i].class_index, data.samples[i].class_index);
    EXPECT_EQ(back.samples[i].wave.samples, data.samples[i].wave.samples);
    EXPECT_EQ(*back.samples[i].image, *data.samples[i].image);
  }
  const auto manifest = read_manifest(dir / "manifest.json");
  ASSERT_TRUE(manifest.norm_stats.has_value());
  EXPECT_EQ(*manifest.norm_stats, stats);
}

TEST(Ingest, RejectsRateMismatchWithAClearMessage) {
  TempDir dir;
  const auto data = tiny_dataset(2, 2);
  const auto manifest = write_dataset(data, dir.path());
  const auto& s = data.samples[1];
  auto wave = s.wave;
  wave.sample_rate_hz = 8000;
  write_f32(wave, dir.path() / manifest.classes[s.class_index].dir / "accel" / (s.id + ".f32"));
  try {
    ingest(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
    EXPECT_NE(std::string(e.what()).find("8000"), std::string::npos);
  }
}

TEST(Ingest, EmptyClassIsNamed) {
  TempDir dir;
  const auto data = tiny_dataset(2, 2);
  const auto manifest = write_dataset(data, dir.path());
  const auto cls = dir.path() / manifest.classes[1].dir;
  for (const char* sub : {"images", "accel"}) {
    for (const auto& e : std::filesystem::directory_iterator(cls / sub)) std::filesystem::remove(e.path());
  }
  try {
    ingest(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(manifest.classes[1].name), std::string::npos) << e.what();
  }
}

TEST(Ingest, UnpairedFilesAreRejected) {
  TempDir dir;
  const auto data = tiny_dataset(2, 2);
  const auto manifest = write_dataset(data, dir.path());
  const auto img = dir.path() / manifest.classes[0].dir / "images";
  std::filesystem::copy_file(img / (data.samples[0].id + ".png"), img / "extra.png");
  EXPECT_THROW(ingest(dir.path()), Error);
}

TEST(Ingest, F32RoundTripAndClassDirNames) {
  TempDir dir;
  codec::Waveform w = testing::random_wave(100, 3);
  for (auto& v : w.samples) v = static_cast<float>(v);
  write_f32(w, dir / "x.f32");
  const auto back = read_f32(dir / "x.f32");
  EXPECT_EQ(back.samples, w.samples);
  EXPECT_EQ(back.sample_rate_hz, w.sample_rate_hz);
  EXPECT_EQ(class_dir_name("Card board"), "card_board");
}

}  // namespace
}  // namespace texvib::dataset
