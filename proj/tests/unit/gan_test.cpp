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

#include "test_support.hpp"
#include "texvib/error.hpp"
#include "texvib/gan/dragan.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/gan/trainer.hpp"

namespace texvib::gan {
namespace {

using testing::tiny_gan;

TEST(Labels, SimplexValidation) {
  EXPECT_NO_THROW(validate_labels(label_batch({0.5, 0.5, 0, 0, 0, 0, 0, 0, 0}, 2)));
  EXPECT_THROW(validate_labels(label_batch({0.6, 0.5, 0, 0, 0, 0, 0, 0, 0}, 1)), Error);
  EXPECT_THROW(validate_labels(label_batch({1.5, -0.5, 0, 0, 0, 0, 0, 0, 0}, 1)), Error);
  EXPECT_TRUE(simplex_violation({0.2, 0.3, 0.5}, 1e-5).empty());
  EXPECT_FALSE(simplex_violation({0.2, 0.3, 0.6}, 1e-5).empty());
  EXPECT_FALSE(simplex_violation({0.2, 0.3, std::nan("")}, 1e-5).empty());
  const auto oh = one_hot({2, 0}, 3);
  EXPECT_EQ(oh, nn::Tensor<float>({2, 3}, std::vector<float>{0, 0, 1, 1, 0, 0}));
  EXPECT_THROW(one_hot({3}, 3), Error);
}

TEST(Labels, NoiseIsSeeded) {
  EXPECT_EQ(sample_noise(3, 5, 11), sample_noise(3, 5, 11));
  EXPECT_NE(sample_noise(3, 5, 11), sample_noise(3, 5, 12));
}

TEST(Generator, OutputShapeAndRange) {
  auto ckpt = tiny_gan(3);
  const auto z = sample_noise(2, ckpt.noise_dim(), 1);
  const auto y = generator_forward(*ckpt.generator, z, one_hot({0, 8}, 9));
  ASSERT_EQ(y.shape(), (nn::Shape{2, 1, 128, 128}));
  for (float v : y.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_THROW(generator_forward(*ckpt.generator, z, label_batch({0.7, 0.7, 0, 0, 0, 0, 0, 0, 0}, 2)),
               Error);
  EXPECT_EQ(GeneratorConfig{}.output_size(), 128);
}

TEST(Generator, SamplesCarryStatsAndAreSeeded) {
  auto ckpt = tiny_gan(3);
  const std::vector<double> label{0, 1, 0, 0, 0, 0, 0, 0, 0};
  const auto a = sample(ckpt, label, 5, 2);
  const auto b = sample(ckpt, label, 5, 2);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].data, b[0].data);
  EXPECT_NE(a[0].data, a[1].data);
  EXPECT_EQ(a[0].stats, ckpt.stats);
}

TEST(Discriminator, ShapesAndRangeCheck) {
  auto ckpt = tiny_gan(4);
  nn::Tensor<float> x({3, 1, 128, 128}, 0.5f);
  const auto [prob, logits] = discriminator_forward(ckpt.discriminator, x);
  EXPECT_EQ(prob.shape(), (nn::Shape{3}));
  EXPECT_EQ(logits.shape(), (nn::Shape{3, 9}));
  x[7] = 1.5f;
  EXPECT_THROW(discriminator_forward(ckpt.discriminator, x), Error);
}

// Penalty value against finite-difference input gradients of the real/fake
// logit at the same perturbed points.
TEST(Dragan, PenaltyMatchesFiniteDifferences) {
  DiscriminatorConfig cfg;
  cfg.input_size = 16;
  cfg.label_dim = 3;
  cfg.channels = {2, 3};
  auto disc = build_discriminator<double>(cfg);
  util::Rng init(21);
  disc.initialize(init);

  nn::Tensor<double> real({2, 1, 16, 16});
  {
    util::Rng rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : real.values()) v = u(rng);
  }
  const double lambda = 10.0, scale = 0.5;
  const std::uint64_t seed = 23;
  const auto result = dragan_penalty(disc, real, lambda, scale, seed, false);

  double mean = 0, var = 0;
  for (double v : real.values()) mean += v;
  mean /= static_cast<double>(real.size());
  for (double v : real.values()) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(real.size()));
  nn::Tensor<double> x_hat(real.shape());
  util::Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t i = 0; i < real.size(); ++i) x_hat[i] = real[i] + scale * sigma * u(rng);

  auto logit_sum = [&](const nn::Tensor<double>& x) {
    const auto out = disc.infer(x);
    return out.adv_logit[0] + out.adv_logit[1];
  };
  const std::int64_t per = 16 * 16;
  const double h = 1e-6;
  double expect = 0.0;
  for (int b = 0; b < 2; ++b) {
    double sq = 0.0;
    for (std::int64_t i = 0; i < per; ++i) {
      auto xp = x_hat, xm = x_hat;
      xp[b * per + i] += h;
      xm[b * per + i] -= h;
      const double g = (logit_sum(xp) - logit_sum(xm)) / (2 * h);
      sq += g * g;
    }
    expect += (std::sqrt(sq) - 1) * (std::sqrt(sq) - 1);
  }
  expect *= lambda / 2.0;
  EXPECT_NEAR(result.penalty, expect, 1e-6 * std::max(1.0, expect));
  EXPECT_THROW(dragan_penalty(disc, real, 0.0, scale, seed, false), Error);
}

GanTrainConfig tiny_train_config() {
  GanTrainConfig cfg;
  cfg.batch_size = 4;
  cfg.steps = 2;
  cfg.seed = 9;
  cfg.generator = testing::tiny_generator_config();
  cfg.discriminator = testing::tiny_discriminator_config();
  return cfg;
}

nn::Tensor<float> real_batch(std::uint64_t seed) {
  nn::Tensor<float> real({4, 1, 128, 128});
  util::Rng rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& v : real.values()) v = u(rng);
  return real;
}

TEST(Trainer, StepsAreDeterministic) {
  auto a = tiny_gan(5), b = tiny_gan(5);
  const auto cfg = tiny_train_config();
  GanTrainer ta(a, cfg), tb(b, cfg);
  const std::vector<int> labels{0, 3, 5, 8};
  for (int i = 0; i < 2; ++i) {
    const auto real = real_batch(30 + i);
    const auto ma = ta.step(real, labels);
    const auto mb = tb.step(real, labels);
    EXPECT_EQ(ma.d_loss, mb.d_loss);
    EXPECT_EQ(ma.g_loss, mb.g_loss);
    EXPECT_TRUE(std::isfinite(ma.penalty));
  }
  EXPECT_EQ(a.step, 2);
  EXPECT_EQ(encode_gan(a), encode_gan(b));
}

TEST(Trainer, NonFiniteLossLeavesNetworksUntouched) {
  auto ckpt = tiny_gan(6);
  // Batch-norm running statistics move during the forward pass; only the
  // optimized parameters must be left as they were.
  auto trainable = [&] {
    std::vector<nn::Tensor<float>> out;
    for (const auto& p : nn::parameters(*ckpt.generator)) {
      if (p.param->trainable) out.push_back(p.param->value);
    }
    for (const auto& p : ckpt.discriminator.parameters()) out.push_back(p.param->value);
    return out;
  };
  const auto before = trainable();
  GanTrainer trainer(ckpt, tiny_train_config());
  auto real = real_batch(40);
  real[100] = std::nanf("");
  try {
    trainer.step(real, {0, 1, 2, 3});
    FAIL() << "expected a numeric error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
  }
  EXPECT_EQ(trainable(), before);
  EXPECT_EQ(ckpt.step, 0);
}

TEST(Trainer, RunAbortsAndDumpsCheckpoint) {
  testing::TempDir dir;
  GanTrainingData data;
  data.class_names = testing::standard_names();
  data.stats = {-20.0, 60.0};
  for (int i = 0; i < 4; ++i) {
    codec::ModelMatrix m = codec::ModelMatrix::Constant(128, 128, 0.5f);
    if (i == 2) m(0, 0) = std::nanf("");
    data.spectrograms.push_back(m);
    data.labels.push_back(i);
  }
  auto cfg = tiny_train_config();
  cfg.batch_size = 4;
  GanTrainHooks hooks;
  hooks.checkpoint_dir = dir.path();
  EXPECT_THROW(train_gan(data, cfg, hooks), Error);
  bool dumped = false;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) dumped |= e.is_regular_file();
  EXPECT_TRUE(dumped);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  testing::TempDir dir;
  auto ckpt = tiny_gan(7);
  ckpt.step = 42;
  save_gan(ckpt, dir / "g.tnn");
  auto back = load_gan(dir / "g.tnn");
  EXPECT_EQ(back.step, 42);
  EXPECT_EQ(back.class_names, ckpt.class_names);
  EXPECT_EQ(back.stats, ckpt.stats);
  EXPECT_EQ(back.generator_config, ckpt.generator_config);
  EXPECT_EQ(back.discriminator_config, ckpt.discriminator_config);
  const std::vector<double> label{0, 0, 0, 0.5, 0.5, 0, 0, 0, 0};
  EXPECT_EQ(sample(ckpt, label, 1, 1)[0].data, sample(back, label, 1, 1)[0].data);
  EXPECT_EQ(encode_gan(back), encode_gan(ckpt));
}

TEST(Checkpoint, ClassCountMustMatchLabelDim) {
  try {
    tiny_gan(1, {"a", "b", "c"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
  }
}

}  // namespace
}  // namespace texvib::gan
