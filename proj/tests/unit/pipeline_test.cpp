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
#include "texvib/codec/stft.hpp"
#include "texvib/error.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/pipeline/pipeline.hpp"
#include "texvib/pipeline/report.hpp"
#include "texvib/pipeline/signature.hpp"

namespace texvib::pipeline {
namespace {

using testing::tiny_encoder;
using testing::tiny_gan;

std::vector<double> one_hot(int k, int dim = 9) {
  std::vector<double> v(dim, 0.0);
  v[k] = 1.0;
  return v;
}

TEST(Signature, DominantFrequencyMatchesBruteForceDft) {
  auto w = testing::random_wave(1000, 3);
  for (std::size_t n = 0; n < w.samples.size(); ++n) {
    w.samples[n] = 0.2 * w.samples[n] + 3.0 * std::sin(2 * std::numbers::pi * 730.0 * n / 10000.0);
  }
  int best = 1;
  double best_mag = -1;
  const auto n = w.samples.size();
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += w.samples[i] * std::polar(1.0, -2 * std::numbers::pi * k * i / n);
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best = static_cast<int>(k);
    }
  }
  EXPECT_DOUBLE_EQ(dominant_frequency_hz(w), best * 10000.0 / n);
  EXPECT_NEAR(dominant_frequency_hz(w), 730.0, 10000.0 / n);
}

TEST(Signature, RowsAndTolerances) {
  codec::ModelMatrix m = codec::ModelMatrix::Zero(16, 4);
  m.row(5).setConstant(0.7f);
  m(9, 0) = 1.0f;
  EXPECT_EQ(dominant_row(m), 5);
  const auto mean = mean_spectrogram({m, codec::ModelMatrix::Ones(16, 4)});
  EXPECT_FLOAT_EQ(mean(5, 1), 0.85f);
  codec::CodecConfig cfg;
  EXPECT_TRUE(within_bins(200.0, 200.0 + 2 * cfg.bin_hz(), cfg, 2.0));
  EXPECT_FALSE(within_bins(200.0, 200.0 + 2.01 * cfg.bin_hz(), cfg, 2.0));
  EXPECT_EQ(nearest_reference(460.0, {200, 450, 700}), 1);
}

TEST(Pipeline, GenerationIsDeterministicAndSized) {
  const auto gan = tiny_gan(1);
  const auto a = generate_from_label(gan, one_hot(2), 5, 4);
  const auto b = generate_from_label(gan, one_hot(2), 5, 4);
  EXPECT_EQ(a.wave.samples, b.wave.samples);
  EXPECT_EQ(a.spectrogram.data, b.spectrogram.data);
  EXPECT_EQ(a.wave.samples.size(), codec::synthesis_length(128, gan.codec));
  EXPECT_NEAR(a.wave.duration_s(), 1.6768, 1e-12);
  const auto c = generate_from_label(gan, one_hot(2), 6, 4);
  EXPECT_NE(a.wave.samples, c.wave.samples);
  EXPECT_THROW(generate_from_label(gan, {0.5, 0.6, 0, 0, 0, 0, 0, 0, 0}, 1, 4), Error);
  EXPECT_THROW(generate_from_label(gan, {1.0, 0.0}, 1, 4), Error);
}

TEST(Pipeline, ImagePathComposesBitExactly) {
  const auto gan = tiny_gan(2);
  const auto enc = tiny_encoder(3);
  const auto spec = testing::small_spec(1, 9);
  for (int k = 0; k < 3; ++k) {
    const auto img = dataset::synthesize_image(spec, k, 40 + k);
    const auto composed = generate_from_image(enc, gan, img, 9, 4);
    const auto label = encoder::encode(enc, img);
    const auto direct = generate_from_label(gan, label, 9, 4);
    EXPECT_EQ(composed.label, label);
    EXPECT_EQ(composed.spectrogram.data, direct.spectrogram.data);
    EXPECT_EQ(composed.wave.samples, direct.wave.samples);
  }
  const auto img = dataset::synthesize_image(spec, 0, 1);
  EXPECT_THROW(generate_from_image(enc, gan, img, 1, 4, encoder::EncodeMode::kRawLogits), Error);
  EXPECT_NO_THROW(generate_from_image(enc, gan, img, 1, 4, encoder::EncodeMode::kHard));
}

TEST(Pipeline, ClassOrderMismatchIsRejected) {
  auto names = testing::standard_names();
  std::swap(names[0], names[1]);
  const auto gan = tiny_gan(2);
  const auto enc = tiny_encoder(3, names);
  try {
    check_compatible(enc, gan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
  }
  const auto img = dataset::synthesize_image(testing::small_spec(1), 0, 1);
  EXPECT_THROW(generate_from_image(enc, gan, img, 1, 4), Error);
}

TEST(Report, SeparationScoreOracle) {
  // Class means on a line: G_k = T_k + 1, T_k = 10k. Intra distance 1,
  // inter distances |10(k - j) + 1|.
  std::vector<codec::ModelMatrix> g, t;
  for (int k = 0; k < 3; ++k) {
    t.push_back(codec::ModelMatrix::Constant(1, 1, 10.0f * k));
    g.push_back(codec::ModelMatrix::Constant(1, 1, 10.0f * k + 1));
  }
  double inter = 0, intra = 0;
  const double s = separation_score(g, t, &inter, &intra);
  const double expect_inter = (9 + 19 + 11 + 9 + 21 + 11) / 6.0;
  EXPECT_NEAR(intra, 1.0, 1e-12);
  EXPECT_NEAR(inter, expect_inter, 1e-9);
  EXPECT_NEAR(s, expect_inter, 1e-9);
}

TEST(Report, JsonRoundTrip) {
  testing::TempDir dir;
  EvalReport r;
  r.classes.push_back({"Glass", 700.0, 32, 8, 0.9, 0.875, 3.5});
  r.aux_accuracy = 0.9;
  r.signature_match_rate = 0.875;
  r.chance_rate = 1.0 / 9;
  r.separation_score = 2.5;
  r.inter_class_distance = 5.0;
  r.intra_class_distance = 2.0;
  r.e2e = E2EReport{72, 0.97, 0.9};
  write_report(r, dir / "r.json");
  EXPECT_EQ(read_report(dir / "r.json"), r);
  r.e2e.reset();
  nlohmann::json j = r;
  EXPECT_EQ(j.get<EvalReport>(), r);
  j["schema"] = "other";
  EXPECT_THROW(j.get<EvalReport>(), Error);
}

// An untrained pair carries no class information: the auxiliary classifier
// lands near chance on balanced generated classes.
TEST(Report, UntrainedGeneratorScoresNearChance) {
  auto spec = testing::small_spec(2);
  spec.image_width = 16;
  spec.image_height = 16;
  const auto test = dataset::synthesize_dataset(spec, 5);
  const auto gan = tiny_gan(8);
  EvalConfig cfg;
  cfg.samples_per_class = 8;
  cfg.glim_iters = 2;
  const auto r = eval_generated(nullptr, gan, test, cfg);
  EXPECT_NEAR(r.chance_rate, 1.0 / 9, 1e-12);
  EXPECT_NEAR(r.aux_accuracy, 1.0 / 9, 0.15);
  EXPECT_EQ(r.classes.size(), 9u);
  EXPECT_FALSE(r.e2e.has_value());
  EXPECT_EQ(eval_generated(nullptr, gan, test, cfg), r);
}

TEST(Report, EvalRejectsClassMismatch) {
  auto spec = testing::small_spec(2, 3);
  spec.image_width = 16;
  spec.image_height = 16;
  const auto test = dataset::synthesize_dataset(spec, 5);
  EXPECT_THROW(eval_generated(nullptr, tiny_gan(1), test, EvalConfig{}), Error);
}

}  // namespace
}  // namespace texvib::pipeline
