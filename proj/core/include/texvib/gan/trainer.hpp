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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "texvib/codec/types.hpp"
#include "texvib/gan/checkpoint.hpp"
#include "texvib/nn/adam.hpp"

namespace texvib::gan {

struct GanTrainConfig {
  int batch_size = 64;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double dragan_lambda = 10.0;
  double dragan_perturb_scale = 0.5;
  double aux_loss_weight = 1.0;
  std::int64_t steps = 0;
  std::uint64_t seed = 1;
  std::int64_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;

  void validate() const;
};

void to_json(nlohmann::json& j, const GanTrainConfig& c);
void from_json(const nlohmann::json& j, GanTrainConfig& c);

struct GanMetrics {
  std::int64_t step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double aux_acc_real = 0.0;
  double aux_acc_fake = 0.0;
  double penalty = 0.0;
};

void to_json(nlohmann::json& j, const GanMetrics& m);

/// Labeled model spectrograms for one training split.
struct GanTrainingData {
  std::vector<codec::ModelMatrix> spectrograms;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  codec::NormStats stats;
  codec::CodecConfig codec;
};

/// Owns the two Adam states and mutates the checkpoint in place.
class GanTrainer {
 public:
  GanTrainer(GanCheckpoint& state, const GanTrainConfig& config);

  /// One discriminator update followed by one generator update on a real
  /// batch (N, 1, H, W) with class indices. Throws kNumeric on a
  /// non-finite loss before any parameter changes.
  GanMetrics step(const nn::Tensor<float>& real, const std::vector<int>& labels);

 private:
  GanCheckpoint& state_;
  GanTrainConfig config_;
  nn::Adam<float> g_opt_;
  nn::Adam<float> d_opt_;
};

struct GanTrainHooks {
  std::function<void(const GanMetrics&)> on_metrics;
  /// Periodic and abort checkpoints go here when non-empty.
  std::filesystem::path checkpoint_dir;
};

/// Runs config.steps steps from a fresh initialization. A non-finite loss
/// aborts the run after dumping the current state to checkpoint_dir.
GanCheckpoint train_gan(const GanTrainingData& data, const GanTrainConfig& config,
                        const GanTrainHooks& hooks = {});

/// Stacks selected spectrograms into an (N, 1, H, W) batch.
nn::Tensor<float> stack_batch(const std::vector<codec::ModelMatrix>& items,
                              const std::vector<std::size_t>& indices);

}  // namespace texvib::gan
