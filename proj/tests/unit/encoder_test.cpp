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
#include <numeric>

#include "test_support.hpp"
#include "texvib/encoder/augment.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"

namespace texvib::encoder {
namespace {

TextureImage gradient_image(int w, int h, std::uint64_t seed) {
  TextureImage img(w, h);
  util::Rng rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  for (auto& v : img.pixels) v = static_cast<float>(u(rng)) / 255.0f;
  return img;
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

// Bottom-up 24-bit BMP with 4-byte row padding, written field by field.
std::vector<std::uint8_t> bmp24(const TextureImage& img) {
  const int stride = (img.width * 3 + 3) / 4 * 4;
  std::vector<std::uint8_t> b{'B', 'M'};
  put_u32(b, 54 + stride * img.height);
  put_u32(b, 0);
  put_u32(b, 54);
  put_u32(b, 40);
  put_u32(b, img.width);
  put_u32(b, img.height);
  put_u16(b, 1);
  put_u16(b, 24);
  for (int i = 0; i < 6; ++i) put_u32(b, 0);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 2; c >= 0; --c) b.push_back(static_cast<std::uint8_t>(std::lround(img.at(y, x, c) * 255)));
    for (int p = img.width * 3; p < stride; ++p) b.push_back(0);
  }
  return b;
}

TEST(ImageIo, PngRoundTripIsExactOnQuantizedImages) {
  const auto img = gradient_image(37, 21, 1);
  EXPECT_EQ(decode_image(encode_png(img)), img);
  TextureImage soft(2, 1, 0.3337f);
  auto q = soft;
  quantize_8bit(q);
  EXPECT_EQ(decode_image(encode_png(soft)), q);
}

TEST(ImageIo, DecodesHandWrittenBmp) {
  const auto img = gradient_image(5, 3, 2);  // odd width exercises row padding
  EXPECT_EQ(decode_image(bmp24(img)), img);
}

TEST(ImageIo, RejectsGarbage) {
  EXPECT_THROW(decode_image({1, 2, 3, 4, 5, 6, 7, 8}), Error);
  auto png = encode_png(gradient_image(4, 4, 3));
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_image(png), Error);
  testing::TempDir dir;
  EXPECT_THROW(read_image(dir / "missing.png"), Error);
}

TEST(Image, CenterCropUpscalesSmallSidesAndCenters) {
  auto img = gradient_image(200, 140, 4);
  const auto c = center_crop(img, 128);
  EXPECT_EQ(c.width, 128);
  EXPECT_EQ(c.height, 128);
  // No scaling needed: the crop is the exact centered window.
  for (int y = 0; y < 128; y += 17)
    for (int x = 0; x < 128; x += 13) EXPECT_FLOAT_EQ(c.at(y, x, 1), img.at(y + 6, x + 36, 1));
  const auto up = center_crop(gradient_image(64, 300, 5), 128);
  EXPECT_EQ(up.width, 128);
  EXPECT_EQ(up.height, 128);
  EXPECT_NO_THROW(up.validate());
}

TEST(Image, ValidateRejectsOutOfRange) {
  TextureImage img(2, 2, 0.5f);
  img.pixels[3] = 1.5f;
  EXPECT_THROW(img.validate(), Error);
}

TEST(Augment, DeterministicPerSeedAndInRange) {
  const auto img = gradient_image(160, 144, 6);
  AugmentConfig cfg;
  const auto a = augment(img, cfg, 10);
  EXPECT_EQ(a, augment(img, cfg, 10));
  EXPECT_NE(a, augment(img, cfg, 11));
  EXPECT_EQ(a.width, 128);
  EXPECT_EQ(a.height, 128);
  EXPECT_NO_THROW(a.validate());
}

TEST(Augment, MixupIsSymmetric) {
  const auto a = gradient_image(8, 8, 7), b = gradient_image(8, 8, 8);
  const std::vector<float> la{1, 0, 0}, lb{0, 0, 1};
  for (double lambda : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    TextureImage x, y;
    std::vector<float> lx, ly;
    mixup(a, la, b, lb, lambda, x, lx);
    mixup(b, lb, a, la, 1.0 - lambda, y, ly);
    EXPECT_EQ(x, y);
    EXPECT_EQ(lx, ly);
    EXPECT_NEAR(std::accumulate(lx.begin(), lx.end(), 0.0), 1.0, 1e-6);
  }
  TextureImage out;
  std::vector<float> lo;
  mixup(a, la, b, lb, 1.0, out, lo);
  EXPECT_EQ(out, a);
}

TEST(Augment, MixupLambdaLiesInUnitInterval) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const double l = sample_mixup_lambda(0.2, s);
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0);
  }
}

TEST(Encoder, EncodeModes) {
  const auto enc = testing::tiny_encoder(1);
  const auto img = gradient_image(150, 130, 9);
  const auto soft = encode(enc, img, EncodeMode::kSoftmax);
  ASSERT_EQ(soft.size(), 9u);
  EXPECT_NEAR(std::accumulate(soft.begin(), soft.end(), 0.0), 1.0, 1e-9);
  for (double v : soft) EXPECT_GE(v, 0.0);
  const auto hard = encode(enc, img, EncodeMode::kHard);
  EXPECT_EQ(std::accumulate(hard.begin(), hard.end(), 0.0), 1.0);
  EXPECT_EQ(std::max_element(hard.begin(), hard.end()) - hard.begin(),
            std::max_element(soft.begin(), soft.end()) - soft.begin());
  const auto raw = encode(enc, img, EncodeMode::kRawLogits);
  EXPECT_EQ(raw.size(), 9u);
  EXPECT_EQ(encode(enc, img), soft);
}

TEST(Encoder, CheckpointRoundTrip) {
  testing::TempDir dir;
  auto enc = testing::tiny_encoder(2);
  enc.test_accuracy = 0.5;
  enc.epochs = 3;
  save_encoder(enc, dir / "e.tnn");
  const auto back = load_encoder(dir / "e.tnn");
  EXPECT_EQ(back.class_names, enc.class_names);
  EXPECT_EQ(back.test_accuracy, 0.5);
  const auto img = gradient_image(128, 128, 3);
  EXPECT_EQ(encode(back, img), encode(enc, img));
}

// Two trivially separable classes (dark vs bright) are learned in a few
// epochs, and training is reproducible for a fixed seed.
TEST(Encoder, TrainingLearnsAndIsDeterministic) {
  LabeledImages train, test;
  for (int i = 0; i < 12; ++i) {
    const int label = i % 2;
    auto img = std::make_shared<TextureImage>(128, 128);
    util::Rng rng(100 + i);
    std::uniform_real_distribution<float> u(0.0f, 0.2f);
    for (auto& v : img->pixels) v = label ? 1.0f - u(rng) : u(rng);
    (i < 8 ? train : test).images.push_back(img);
    (i < 8 ? train : test).labels.push_back(label);
  }
  EncoderTrainConfig cfg;
  cfg.batch_size = 4;
  cfg.max_epochs = 4;
  cfg.expected_classes = 0;
  cfg.val_fraction = 0.25;
  cfg.augment.mixup_alpha = 0.0;
  cfg.augment.erase_prob = 0.0;
  std::vector<EncoderEpochLog> logs;
  auto a = train_encoder(train, test, {"dark", "bright"}, cfg,
                         [&](const EncoderEpochLog& l) { logs.push_back(l); });
  auto b = train_encoder(train, test, {"dark", "bright"}, cfg);
  EXPECT_FALSE(logs.empty());
  EXPECT_EQ(a.test_accuracy, 1.0);
  EXPECT_EQ(encode_encoder(a), encode_encoder(b));
  cfg.expected_classes = 9;
  EXPECT_THROW(train_encoder(train, test, {"dark", "bright"}, cfg), Error);
}

}  // namespace
}  // namespace texvib::encoder
