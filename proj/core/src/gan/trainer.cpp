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

#include "texvib/gan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "texvib/error.hpp"
#include "texvib/gan/dragan.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/nn/losses.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::gan {

namespace {

enum Stream : std::uint64_t { kNoise = 1, kFakeLabels = 2, kDragan = 3, kBatches = 4 };

double accuracy(const nn::Tensor<float>& logits, const std::vector<int>& labels) {
  const auto pred = nn::argmax_rows(logits);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

void scale(nn::Tensor<float>& t, double k) {
  for (auto& v : t.values()) v = static_cast<float>(v * k);
}

void require_finite(double v, const char* what, std::int64_t step) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::kNumeric, std::string("non-finite ") + what + " at step " + std::to_string(step));
  }
}

nn::AdamConfig adam_config(const GanTrainConfig& c) {
  nn::AdamConfig a;
  a.learning_rate = c.lr;
  a.beta1 = c.beta1;
  a.beta2 = c.beta2;
  return a;
}

}  // namespace

void GanTrainConfig::validate() const {
  if (batch_size < 2) fail(ErrorCode::kInvalidArgument, "gan batch_size must be >= 2");
  if (!(lr > 0) || !(dragan_lambda > 0) || !(dragan_perturb_scale > 0) || !(aux_loss_weight > 0)) {
    fail(ErrorCode::kInvalidArgument, "gan lr, dragan and aux weights must be positive");
  }
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    fail(ErrorCode::kInvalidArgument, "adam betas must be in [0, 1)");
  }
  if (steps < 0 || checkpoint_every < 0) {
    fail(ErrorCode::kInvalidArgument, "steps and checkpoint_every must be nonnegative");
  }
  generator.validate();
  discriminator.validate();
}

void to_json(nlohmann::json& j, const GanTrainConfig& c) {
  j = {{"batch_size", c.batch_size},
       {"lr", c.lr},
       {"beta1", c.beta1},
       {"beta2", c.beta2},
       {"dragan_lambda", c.dragan_lambda},
       {"dragan_perturb_scale", c.dragan_perturb_scale},
       {"aux_loss_weight", c.aux_loss_weight},
       {"steps", c.steps},
       {"seed", c.seed},
       {"checkpoint_every", c.checkpoint_every},
       {"generator", c.generator},
       {"discriminator", c.discriminator}};
}

void from_json(const nlohmann::json& j, GanTrainConfig& c) {
  GanTrainConfig out;
  out.batch_size = j.value("batch_size", out.batch_size);
  out.lr = j.value("lr", out.lr);
  out.beta1 = j.value("beta1", out.beta1);
  out.beta2 = j.value("beta2", out.beta2);
  out.dragan_lambda = j.value("dragan_lambda", out.dragan_lambda);
  out.dragan_perturb_scale = j.value("dragan_perturb_scale", out.dragan_perturb_scale);
  out.aux_loss_weight = j.value("aux_loss_weight", out.aux_loss_weight);
  out.steps = j.value("steps", out.steps);
  out.seed = j.value("seed", out.seed);
  out.checkpoint_every = j.value("checkpoint_every", out.checkpoint_every);
  if (j.contains("generator")) out.generator = j.at("generator").get<GeneratorConfig>();
  if (j.contains("discriminator")) out.discriminator = j.at("discriminator").get<DiscriminatorConfig>();
  out.validate();
  c = out;
}

void to_json(nlohmann::json& j, const GanMetrics& m) {
  j = {{"step", m.step},
       {"d_loss", m.d_loss},
       {"g_loss", m.g_loss},
       {"aux_acc_real", m.aux_acc_real},
       {"aux_acc_fake", m.aux_acc_fake},
       {"penalty", m.penalty}};
}

GanTrainer::GanTrainer(GanCheckpoint& state, const GanTrainConfig& config)
    : state_(state),
      config_(config),
      g_opt_(nn::parameters(*state.generator), adam_config(config)),
      d_opt_(state.discriminator.parameters(), adam_config(config)) {
  config_.validate();
}

GanMetrics GanTrainer::step(const nn::Tensor<float>& real, const std::vector<int>& labels) {
  const int n = static_cast<int>(real.dim(0));
  if (n < 2 || static_cast<int>(labels.size()) != n) {
    fail(ErrorCode::kDimension, "gan step needs a batch of >= 2 with one label per sample");
  }
  const std::int64_t t = state_.step;
  const int k = state_.label_dim();
  auto& gen = *state_.generator;
  auto& disc = state_.discriminator;
  const double aux_w = config_.aux_loss_weight;
  GanMetrics m;
  m.step = t + 1;

  const auto z = sample_noise(n, state_.noise_dim(), util::derive_seed(config_.seed, {kNoise, static_cast<std::uint64_t>(t)}));
  std::vector<int> fake_labels(static_cast<std::size_t>(n));
  {
    util::Rng rng(util::derive_seed(config_.seed, {kFakeLabels, static_cast<std::uint64_t>(t)}));
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (auto& c : fake_labels) c = pick(rng);
  }
  const nn::Tensor<float> fake = gen.forward(concat_features(z, one_hot(fake_labels, k)));

  // Discriminator: real -> 1, fake -> 0, both classified, plus the penalty.
  disc.zero_grad();
  const nn::Tensor<float> ones({n, 1}, 1.0f);
  const nn::Tensor<float> zeros({n, 1}, 0.0f);
  {
    auto out = disc.forward(real);
    auto adv = nn::bce_with_logits(out.adv_logit, ones);
    auto cls = nn::cross_entropy(out.cls_logits, labels);
    m.d_loss += adv.value + aux_w * cls.value;
    m.aux_acc_real = accuracy(out.cls_logits, labels);
    require_finite(m.d_loss, "discriminator loss", m.step);
    scale(cls.grad, aux_w);
    disc.backward(adv.grad, cls.grad, nn::ParamGrads::kAccumulate);
  }
  {
    auto out = disc.forward(fake);
    auto adv = nn::bce_with_logits(out.adv_logit, zeros);
    auto cls = nn::cross_entropy(out.cls_logits, fake_labels);
    m.d_loss += adv.value + aux_w * cls.value;
    m.aux_acc_fake = accuracy(out.cls_logits, fake_labels);
    require_finite(m.d_loss, "discriminator loss", m.step);
    scale(cls.grad, aux_w);
    disc.backward(adv.grad, cls.grad, nn::ParamGrads::kAccumulate);
  }
  const auto penalty = dragan_penalty(disc, real, config_.dragan_lambda, config_.dragan_perturb_scale,
                                      util::derive_seed(config_.seed, {kDragan, static_cast<std::uint64_t>(t)}), true);
  m.penalty = penalty.penalty;
  m.d_loss += penalty.penalty;
  require_finite(m.d_loss, "discriminator loss", m.step);

  // Generator: fool the discriminator and hit the requested class. Scored
  // against the pre-update discriminator so that a non-finite loss here
  // still leaves both networks untouched.
  nn::Tensor<float> d_fake;
  {
    auto out = disc.forward(fake);
    auto adv = nn::bce_with_logits(out.adv_logit, ones);
    auto cls = nn::cross_entropy(out.cls_logits, fake_labels);
    m.g_loss = adv.value + aux_w * cls.value;
    require_finite(m.g_loss, "generator loss", m.step);
    scale(cls.grad, aux_w);
    d_fake = disc.backward(adv.grad, cls.grad, nn::ParamGrads::kSkip);
  }
  nn::zero_grad(gen);
  gen.backward(d_fake, nn::ParamGrads::kAccumulate);
  d_opt_.step();
  g_opt_.step();
  state_.step = m.step;
  return m;
}

nn::Tensor<float> stack_batch(const std::vector<codec::ModelMatrix>& items,
                              const std::vector<std::size_t>& indices) {
  if (indices.empty()) fail(ErrorCode::kInvalidArgument, "empty batch");
  const auto& first = items.at(indices.front());
  const std::int64_t h = first.rows(), w = first.cols();
  nn::Tensor<float> out({static_cast<std::int64_t>(indices.size()), 1, h, w});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& m = items.at(indices[i]);
    if (m.rows() != h || m.cols() != w) fail(ErrorCode::kDimension, "spectrograms in a batch differ in size");
    std::copy_n(m.data(), h * w, out.data() + static_cast<std::int64_t>(i) * h * w);
  }
  return out;
}

GanCheckpoint train_gan(const GanTrainingData& data, const GanTrainConfig& config,
                        const GanTrainHooks& hooks) {
  config.validate();
  if (data.spectrograms.empty()) fail(ErrorCode::kInvalidArgument, "gan training set is empty");
  if (data.labels.size() != data.spectrograms.size()) {
    fail(ErrorCode::kDimension, "gan training set has mismatched labels");
  }
  if (static_cast<int>(data.class_names.size()) != config.generator.label_dim) {
    fail(ErrorCode::kMismatch, "dataset has " + std::to_string(data.class_names.size()) +
                                   " classes but label_dim is " +
                                   std::to_string(config.generator.label_dim));
  }
  const int size = config.generator.output_size();
  for (const auto& s : data.spectrograms) {
    if (s.rows() != size || s.cols() != size) {
      fail(ErrorCode::kDimension, "training spectrogram is " + std::to_string(s.rows()) + "x" +
                                      std::to_string(s.cols()) + ", generator emits " +
                                      std::to_string(size) + "x" + std::to_string(size));
    }
  }

  GanCheckpoint state = init_gan(config.generator, config.discriminator, data.class_names,
                                 data.stats, data.codec, config.seed);
  GanTrainer trainer(state, config);

  auto dump = [&](const std::string& name) {
    if (hooks.checkpoint_dir.empty()) return;
    std::filesystem::create_directories(hooks.checkpoint_dir);
    save_gan(state, hooks.checkpoint_dir / name);
  };

  std::vector<std::size_t> order(data.spectrograms.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::uint64_t epoch = 0;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (std::int64_t s = 0; s < config.steps; ++s) {
    std::vector<std::size_t> picked;
    while (picked.size() < batch) {
      if (cursor == order.size()) {
        util::Rng rng(util::derive_seed(config.seed, {kBatches, epoch++}));
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      picked.push_back(order[cursor++]);
    }
    std::vector<int> labels;
    for (auto i : picked) labels.push_back(data.labels[i]);
    GanMetrics m;
    try {
      m = trainer.step(stack_batch(data.spectrograms, picked), labels);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNumeric) dump("gan-aborted.tnn");
      throw;
    }
    if (hooks.on_metrics) hooks.on_metrics(m);
    if (config.checkpoint_every > 0 && m.step % config.checkpoint_every == 0) {
      dump("gan-step-" + std::to_string(m.step) + ".tnn");
    }
  }
  return state;
}

}  // namespace texvib::gan
