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

#include "texvib/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "texvib/error.hpp"
#include "texvib/nn/adam.hpp"
#include "texvib/nn/checkpoint.hpp"
#include "texvib/nn/losses.hpp"
#include "texvib/util/binary_io.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::encoder {

namespace {

enum Stream : std::uint64_t { kInit = 0, kSplit = 1, kShuffle = 2, kAugment = 3, kMix = 4 };

constexpr int kEvalBatch = 64;

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const nn::Sequential<float>& net, const std::vector<TextureImage>& images,
                    const std::vector<int>& labels) {
  Evaluation ev;
  for (std::size_t start = 0; start < images.size(); start += kEvalBatch) {
    const std::size_t end = std::min(images.size(), start + kEvalBatch);
    std::vector<const TextureImage*> batch;
    std::vector<int> y(labels.begin() + static_cast<std::ptrdiff_t>(start),
                       labels.begin() + static_cast<std::ptrdiff_t>(end));
    for (std::size_t i = start; i < end; ++i) batch.push_back(&images[i]);
    const nn::Tensor<float> logits = net.infer(to_tensor(batch));
    ev.loss += nn::cross_entropy(logits, y).value * static_cast<double>(end - start);
    const auto pred = nn::argmax_rows(logits);
    for (std::size_t i = 0; i < y.size(); ++i) ev.accuracy += pred[i] == y[i];
  }
  ev.loss /= static_cast<double>(images.size());
  ev.accuracy /= static_cast<double>(images.size());
  return ev;
}

void check_labeled(const LabeledImages& data, int classes, const char* what) {
  if (data.images.empty()) fail(ErrorCode::kInvalidArgument, std::string(what) + " split is empty");
  if (data.images.size() != data.labels.size()) {
    fail(ErrorCode::kDimension, std::string(what) + " split has mismatched labels");
  }
  for (int l : data.labels) {
    if (l < 0 || l >= classes) {
      fail(ErrorCode::kInvalidArgument, std::string(what) + " label " + std::to_string(l) + " out of range");
    }
  }
}

}  // namespace

std::vector<nn::LayerSpec> encoder_specs(int num_classes) {
  using nn::LayerSpec;
  return {LayerSpec::conv2d(3, 16, 3, 2, 1),
          LayerSpec::batch_norm(16),
          LayerSpec::relu(),
          LayerSpec::residual_block(16, 16, 1),
          LayerSpec::residual_block(16, 32, 2),
          LayerSpec::residual_block(32, 64, 2),
          LayerSpec::residual_block(64, 128, 2),
          LayerSpec::global_avg_pool(),
          LayerSpec::dense(128, num_classes)};
}

void EncoderTrainConfig::validate() const {
  if (batch_size < 2) fail(ErrorCode::kInvalidArgument, "encoder batch_size must be >= 2");
  if (!(lr > 0) || max_epochs < 0 || plateau_patience < 1 || max_decays < 0) {
    fail(ErrorCode::kInvalidArgument, "encoder schedule settings out of range");
  }
  if (!(decay_factor > 0 && decay_factor < 1)) {
    fail(ErrorCode::kInvalidArgument, "encoder decay_factor must be in (0, 1)");
  }
  if (!(val_fraction > 0 && val_fraction < 1)) {
    fail(ErrorCode::kInvalidArgument, "encoder val_fraction must be in (0, 1)");
  }
  augment.validate();
}

void to_json(nlohmann::json& j, const EncoderTrainConfig& c) {
  j = {{"batch_size", c.batch_size},
       {"lr", c.lr},
       {"max_epochs", c.max_epochs},
       {"plateau_patience", c.plateau_patience},
       {"decay_factor", c.decay_factor},
       {"max_decays", c.max_decays},
       {"val_fraction", c.val_fraction},
       {"expected_classes", c.expected_classes},
       {"seed", c.seed},
       {"augment", c.augment}};
}

void from_json(const nlohmann::json& j, EncoderTrainConfig& c) {
  EncoderTrainConfig o;
  o.batch_size = j.value("batch_size", o.batch_size);
  o.lr = j.value("lr", o.lr);
  o.max_epochs = j.value("max_epochs", o.max_epochs);
  o.plateau_patience = j.value("plateau_patience", o.plateau_patience);
  o.decay_factor = j.value("decay_factor", o.decay_factor);
  o.max_decays = j.value("max_decays", o.max_decays);
  o.val_fraction = j.value("val_fraction", o.val_fraction);
  o.expected_classes = j.value("expected_classes", o.expected_classes);
  o.seed = j.value("seed", o.seed);
  if (j.contains("augment")) o.augment = j.at("augment").get<AugmentConfig>();
  o.validate();
  c = o;
}

std::vector<std::uint8_t> encode_encoder(EncoderCheckpoint& ckpt) {
  const nlohmann::json meta{{"kind", "encoder"},
                            {"class_names", ckpt.class_names},
                            {"input_size", kInputSize},
                            {"test_accuracy", ckpt.test_accuracy},
                            {"epochs", ckpt.epochs}};
  return nn::encode_networks({{"encoder", ckpt.network.get()}}, meta);
}

EncoderCheckpoint decode_encoder(const std::vector<std::uint8_t>& bytes) {
  nn::LoadedNetworks loaded = nn::decode_networks(bytes);
  EncoderCheckpoint ckpt;
  try {
    if (loaded.meta.value("kind", "") != "encoder") {
      fail(ErrorCode::kFormat, "checkpoint is not an encoder checkpoint");
    }
    ckpt.class_names = loaded.meta.at("class_names").get<std::vector<std::string>>();
    ckpt.test_accuracy = loaded.meta.value("test_accuracy", 0.0);
    ckpt.epochs = loaded.meta.value("epochs", 0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("bad encoder checkpoint metadata: ") + e.what());
  }
  ckpt.network = loaded.take("encoder");
  if (nn::specs(*ckpt.network) != encoder_specs(ckpt.num_classes())) {
    fail(ErrorCode::kFormat, "encoder checkpoint layers disagree with the class count");
  }
  return ckpt;
}

void save_encoder(EncoderCheckpoint& ckpt, const std::filesystem::path& path) {
  util::write_file(path, encode_encoder(ckpt));
}

EncoderCheckpoint load_encoder(const std::filesystem::path& path) {
  return decode_encoder(util::read_file(path));
}

TextureImage preprocess(const TextureImage& img) { return center_crop(img, kInputSize); }

std::vector<double> encode(const EncoderCheckpoint& ckpt, const TextureImage& img, EncodeMode mode) {
  const TextureImage x = preprocess(img);
  const nn::Tensor<float> logits = ckpt.network->infer(to_tensor({&x}));
  const auto k = static_cast<std::size_t>(logits.dim(1));
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = logits[static_cast<std::int64_t>(i)];
  if (mode == EncodeMode::kRawLogits) return out;
  const auto best = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
  if (mode == EncodeMode::kHard) {
    std::fill(out.begin(), out.end(), 0.0);
    out[best] = 1.0;
    return out;
  }
  const double peak = out[best];
  double sum = 0.0;
  for (auto& v : out) sum += v = std::exp(v - peak);
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<int> predict(const EncoderCheckpoint& ckpt, const std::vector<const TextureImage*>& images) {
  std::vector<int> out;
  for (std::size_t start = 0; start < images.size(); start += kEvalBatch) {
    const std::size_t end = std::min(images.size(), start + kEvalBatch);
    std::vector<TextureImage> crops;
    for (std::size_t i = start; i < end; ++i) crops.push_back(preprocess(*images[i]));
    std::vector<const TextureImage*> ptrs;
    for (const auto& c : crops) ptrs.push_back(&c);
    const auto pred = nn::argmax_rows(ckpt.network->infer(to_tensor(ptrs)));
    out.insert(out.end(), pred.begin(), pred.end());
  }
  return out;
}

double accuracy(const EncoderCheckpoint& ckpt, const LabeledImages& data) {
  check_labeled(data, ckpt.num_classes(), "evaluation");
  std::vector<const TextureImage*> ptrs;
  for (const auto& img : data.images) ptrs.push_back(img.get());
  const auto pred = predict(ckpt, ptrs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

EncoderCheckpoint train_encoder(const LabeledImages& train, const LabeledImages& test,
                                const std::vector<std::string>& class_names,
                                const EncoderTrainConfig& config,
                                const std::function<void(const EncoderEpochLog&)>& on_epoch) {
  config.validate();
  const int k = static_cast<int>(class_names.size());
  if (k < 2) fail(ErrorCode::kInvalidArgument, "encoder needs at least 2 classes, got " + std::to_string(k));
  if (config.expected_classes > 0 && k != config.expected_classes) {
    fail(ErrorCode::kMismatch, "encoder expects " + std::to_string(config.expected_classes) +
                                   " classes, dataset has " + std::to_string(k));
  }
  check_labeled(train, k, "training");
  check_labeled(test, k, "test");

  // Stratified validation carve-out.
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.labels.size(); ++i) by_class[train.labels[i]].push_back(i);
  std::vector<std::size_t> fit_idx, val_idx;
  {
    util::Rng rng(util::derive_seed(config.seed, {kSplit}));
    for (auto& [label, idx] : by_class) {
      std::shuffle(idx.begin(), idx.end(), rng);
      std::size_t n_val = static_cast<std::size_t>(std::lround(idx.size() * config.val_fraction));
      n_val = std::clamp<std::size_t>(n_val, idx.size() >= 2 ? 1 : 0, idx.size() - 1);
      val_idx.insert(val_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
      fit_idx.insert(fit_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
    }
  }
  std::sort(fit_idx.begin(), fit_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  if (fit_idx.size() < 2 || val_idx.empty()) {
    fail(ErrorCode::kInvalidArgument, "training split too small for a validation carve-out");
  }
  std::vector<TextureImage> val_images;
  std::vector<int> val_labels;
  for (auto i : val_idx) {
    val_images.push_back(preprocess(*train.images[i]));
    val_labels.push_back(train.labels[i]);
  }

  EncoderCheckpoint ckpt;
  ckpt.class_names = class_names;
  ckpt.network = nn::make_sequential<float>(encoder_specs(k));
  {
    util::Rng rng(util::derive_seed(config.seed, {kInit}));
    ckpt.network->initialize(rng);
  }
  auto& net = *ckpt.network;
  auto params = nn::parameters(net);
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.lr;
  nn::Adam<float> opt(params, adam_cfg);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<nn::Tensor<float>> best_params;
  int bad_evals = 0, decays = 0;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const bool use_mixup = config.augment.mixup_alpha > 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::vector<std::size_t> order = fit_idx;
    {
      util::Rng rng(util::derive_seed(config.seed, {kShuffle, static_cast<std::uint64_t>(epoch)}));
      std::shuffle(order.begin(), order.end(), rng);
    }
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start + 2 <= order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::size_t n = end - start;
      std::vector<TextureImage> views(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = order[start + i];
        views[i] = augment(*train.images[idx], config.augment,
                           util::derive_seed(config.seed, {kAugment, static_cast<std::uint64_t>(epoch), idx}));
      }
      nn::Tensor<float> targets({static_cast<std::int64_t>(n), k});
      for (std::size_t i = 0; i < n; ++i) {
        targets[static_cast<std::int64_t>(i) * k + train.labels[order[start + i]]] = 1.0f;
      }
      if (use_mixup) {
        const std::uint64_t mix_seed =
            util::derive_seed(config.seed, {kMix, static_cast<std::uint64_t>(epoch), start});
        const double lambda = sample_mixup_lambda(config.augment.mixup_alpha, mix_seed);
        std::vector<std::size_t> partner(n);
        std::iota(partner.begin(), partner.end(), 0);
        util::Rng rng(util::derive_seed(mix_seed, {1}));
        std::shuffle(partner.begin(), partner.end(), rng);
        std::vector<TextureImage> mixed(n);
        nn::Tensor<float> mixed_targets(targets.shape());
        std::vector<float> la(static_cast<std::size_t>(k)), lb(la), lm;
        for (std::size_t i = 0; i < n; ++i) {
          std::copy_n(targets.data() + i * k, k, la.begin());
          std::copy_n(targets.data() + partner[i] * k, k, lb.begin());
          mixup(views[i], la, views[partner[i]], lb, lambda, mixed[i], lm);
          std::copy(lm.begin(), lm.end(), mixed_targets.data() + i * k);
        }
        views = std::move(mixed);
        targets = std::move(mixed_targets);
      }
      std::vector<const TextureImage*> ptrs;
      for (const auto& v : views) ptrs.push_back(&v);
      opt.zero_grad();
      const nn::Tensor<float> logits = net.forward(to_tensor(ptrs));
      const auto loss = nn::cross_entropy(logits, targets);
      if (!std::isfinite(loss.value)) {
        fail(ErrorCode::kNumeric, "non-finite encoder loss in epoch " + std::to_string(epoch));
      }
      net.backward(loss.grad, nn::ParamGrads::kAccumulate);
      opt.step();
      loss_sum += loss.value * static_cast<double>(n);
      seen += n;
    }

    const Evaluation val = evaluate(net, val_images, val_labels);
    if (on_epoch) {
      on_epoch({epoch + 1, loss_sum / static_cast<double>(std::max<std::size_t>(seen, 1)), val.loss,
                val.accuracy, opt.learning_rate()});
    }
    ckpt.epochs = epoch + 1;
    if (val.loss < best_val) {
      best_val = val.loss;
      bad_evals = 0;
      best_params.clear();
      for (const auto& p : params) best_params.push_back(p.param->value);
    } else if (++bad_evals >= config.plateau_patience) {
      if (decays == config.max_decays) break;
      opt.set_learning_rate(opt.learning_rate() * config.decay_factor);
      ++decays;
      bad_evals = 0;
    }
  }
  if (!best_params.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i].param->value = best_params[i];
  }
  ckpt.test_accuracy = accuracy(ckpt, test);
  return ckpt;
}

}  // namespace texvib::encoder
