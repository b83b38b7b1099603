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

// Texture-image classifier whose 9-way output is the label vector that
// conditions the generator.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "texvib/encoder/augment.hpp"
#include "texvib/encoder/image.hpp"
#include "texvib/nn/layers.hpp"

namespace texvib::encoder {

inline constexpr int kInputSize = 128;

/// conv3x3/s2 stem (16) + batch_norm + relu, residual blocks
/// 16 -> 16 -> 32/s2 -> 64/s2 -> 128/s2, global average pool, dense to K.
std::vector<nn::LayerSpec> encoder_specs(int num_classes);

struct EncoderTrainConfig {
  int batch_size = 64;
  double lr = 1e-3;
  int max_epochs = 60;
  int plateau_patience = 3;  // evaluations without val-loss improvement
  double decay_factor = 0.1;
  int max_decays = 2;
  double val_fraction = 0.125;  // carved per class from the training split
  int expected_classes = 9;     // 0 accepts any count >= 2
  std::uint64_t seed = 1;
  AugmentConfig augment;

  void validate() const;
};

void to_json(nlohmann::json& j, const EncoderTrainConfig& c);
void from_json(const nlohmann::json& j, EncoderTrainConfig& c);

struct LabeledImages {
  std::vector<std::shared_ptr<const TextureImage>> images;
  std::vector<int> labels;
};

struct EncoderEpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double lr = 0.0;
};

struct EncoderCheckpoint {
  std::unique_ptr<nn::Sequential<float>> network;
  std::vector<std::string> class_names;
  double test_accuracy = 0.0;
  int epochs = 0;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

std::vector<std::uint8_t> encode_encoder(EncoderCheckpoint& ckpt);
EncoderCheckpoint decode_encoder(const std::vector<std::uint8_t>& bytes);
void save_encoder(EncoderCheckpoint& ckpt, const std::filesystem::path& path);
EncoderCheckpoint load_encoder(const std::filesystem::path& path);

/// Trains from scratch, keeps the parameters of the best validation loss,
/// then scores the test split.
EncoderCheckpoint train_encoder(const LabeledImages& train, const LabeledImages& test,
                                const std::vector<std::string>& class_names,
                                const EncoderTrainConfig& config,
                                const std::function<void(const EncoderEpochLog&)>& on_epoch = {});

enum class EncodeMode {
  kSoftmax,   // probability vector on the simplex (default)
  kHard,      // one-hot of the argmax
  kRawLogits  // pre-softmax activations; not a valid generator label
};

/// Deterministic preprocessing used at inference: center crop to 128.
TextureImage preprocess(const TextureImage& img);

std::vector<double> encode(const EncoderCheckpoint& ckpt, const TextureImage& img,
                           EncodeMode mode = EncodeMode::kSoftmax);

/// Batched argmax predictions over preprocessed images.
std::vector<int> predict(const EncoderCheckpoint& ckpt, const std::vector<const TextureImage*>& images);

double accuracy(const EncoderCheckpoint& ckpt, const LabeledImages& data);

}  // namespace texvib::encoder
