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

#include "texvib/gan/gradient_suite.hpp"

#include <functional>
#include <random>

#include "texvib/gan/dragan.hpp"
#include "texvib/gan/networks.hpp"
#include "texvib/nn/losses.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::gan {

namespace {

using nn::GradCheckOptions;
using nn::GradTarget;
using nn::LayerSpec;
using nn::Tensor;
using TensorD = Tensor<double>;

// Entries in [-1, -0.1] U [0.1, 1] keep ReLU-family kinks out of the
// difference stencil.
TensorD away_from_zero(nn::Shape shape, util::Rng& rng) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  TensorD t(std::move(shape));
  for (auto& v : t.values()) v = sign(rng) ? mag(rng) : -mag(rng);
  return t;
}

TensorD uniform(nn::Shape shape, double lo, double hi, util::Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  TensorD t(std::move(shape));
  for (auto& v : t.values()) v = u(rng);
  return t;
}

struct Suite {
  std::uint64_t seed;
  std::string filter;
  std::vector<GradientCase> cases;

  bool wanted(const std::string& name) const {
    return filter.empty() || name.find(filter) != std::string::npos;
  }

  void add(const std::string& name, const std::string& group, double tol,
           const std::function<nn::GradCheckReport(util::Rng&, const GradCheckOptions&)>& run) {
    if (!wanted(name)) return;
    util::Rng rng(util::derive_seed(seed, {cases.size() + 1}));
    GradCheckOptions opts;
    opts.seed = util::derive_seed(seed, {cases.size() + 1, 7});
    opts.tolerance = tol;
    cases.push_back({name, group, tol, run(rng, opts)});
  }

  void layer(const std::string& name, std::vector<LayerSpec> specs, nn::Shape input,
             double tol = kLayerTolerance, std::int64_t max_entries = 0) {
    add(name, "layer", tol, [&](util::Rng& rng, GradCheckOptions opts) {
      auto net = nn::make_sequential<double>(specs);
      net->initialize(rng);
      // Non-trivial affine parameters so gamma/beta gradients are exercised.
      for (auto& p : nn::parameters(*net)) {
        if (p.name.find("gamma") != std::string::npos || p.name.find("beta") != std::string::npos) {
          p.param->value = uniform(p.param->value.shape(), 0.5, 1.5, rng);
        }
      }
      opts.max_entries_per_tensor = max_entries;
      return nn::grad_check(*net, away_from_zero(input, rng), opts);
    });
  }

  void loss(const std::string& name, nn::Shape shape,
            const std::function<TensorD(util::Rng&, const nn::Shape&)>& make_input,
            const std::function<nn::LossResult<double>(const TensorD&)>& fn) {
    add(name, "loss", kLayerTolerance, [&](util::Rng& rng, const GradCheckOptions& opts) {
      TensorD x = make_input(rng, shape);
      const auto analytic = fn(x).grad;
      return nn::check_targets([&] { return fn(x).value; }, {{"input", &x, analytic}}, opts);
    });
  }
};

Discriminator<double> small_discriminator(util::Rng& rng) {
  DiscriminatorConfig cfg;
  cfg.input_size = 8;
  cfg.label_dim = 3;
  cfg.channels = {3, 4};
  auto disc = build_discriminator<double>(cfg);
  disc.initialize(rng);
  return disc;
}

std::vector<GradTarget> disc_targets(Discriminator<double>& disc) {
  std::vector<GradTarget> out;
  for (auto& p : disc.parameters()) {
    if (p.param->trainable) out.push_back({p.name, &p.param->value, p.param->grad});
  }
  return out;
}

}  // namespace

std::vector<GradientCase> run_gradient_suite(std::uint64_t seed, const std::string& filter) {
  Suite s{seed, filter, {}};

  s.layer("dense", {LayerSpec::dense(5, 4)}, {3, 5});
  s.layer("conv2d_direct", {LayerSpec::conv2d(2, 3, 3, 1, 1)}, {2, 2, 6, 6});
  s.layer("conv2d_gemm_stride2", {LayerSpec::conv2d(2, 6, 3, 2, 1)}, {2, 2, 7, 7});
  s.layer("conv2d_1x1", {LayerSpec::conv2d(3, 5, 1, 1, 0)}, {2, 3, 4, 4});
  s.layer("batch_norm_2d", {LayerSpec::batch_norm(3)}, {4, 3});
  s.layer("batch_norm_4d", {LayerSpec::batch_norm(2)}, {3, 2, 3, 3});
  s.layer("leaky_relu", {LayerSpec::leaky_relu(0.2)}, {3, 7});
  s.layer("relu", {LayerSpec::relu()}, {3, 7});
  s.layer("sigmoid", {LayerSpec::sigmoid()}, {3, 7});
  s.layer("softmax", {LayerSpec::softmax()}, {3, 6});
  s.layer("pixel_shuffle", {LayerSpec::conv2d(1, 4, 1, 1, 0), LayerSpec::pixel_shuffle(2)},
          {2, 1, 3, 3});
  s.layer("reshape", {LayerSpec::dense(4, 12), LayerSpec::reshape({3, 2, 2})}, {2, 4});
  s.layer("flatten", {LayerSpec::conv2d(2, 2, 3, 1, 1), LayerSpec::flatten()}, {2, 2, 3, 3});
  s.layer("global_avg_pool", {LayerSpec::conv2d(2, 3, 3, 1, 1), LayerSpec::global_avg_pool()},
          {2, 2, 4, 4});
  s.layer("residual_block_identity", {LayerSpec::residual_block(2, 2, 1)}, {3, 2, 5, 5});
  s.layer("residual_block_projection", {LayerSpec::residual_block(2, 4, 2)}, {3, 2, 6, 6});

  s.loss("bce", {4, 3},
         [](util::Rng& rng, const nn::Shape& sh) { return uniform(sh, 0.05, 0.95, rng); },
         [](const TensorD& p) {
           TensorD t(p.shape());
           for (std::int64_t i = 0; i < t.size(); ++i) t[i] = i % 3 == 0 ? 1.0 : (i % 3 == 1 ? 0.0 : 0.3);
           return nn::bce(p, t);
         });
  s.loss("bce_with_logits", {4, 3},
         [](util::Rng& rng, const nn::Shape& sh) { return uniform(sh, -4.0, 4.0, rng); },
         [](const TensorD& x) {
           TensorD t(x.shape());
           for (std::int64_t i = 0; i < t.size(); ++i) t[i] = i % 2 == 0 ? 1.0 : 0.0;
           return nn::bce_with_logits(x, t);
         });
  s.loss("cross_entropy_hard", {4, 5},
         [](util::Rng& rng, const nn::Shape& sh) { return uniform(sh, -3.0, 3.0, rng); },
         [](const TensorD& x) { return nn::cross_entropy(x, std::vector<int>{0, 4, 2, 2}); });
  s.loss("cross_entropy_soft", {3, 4},
         [](util::Rng& rng, const nn::Shape& sh) { return uniform(sh, -3.0, 3.0, rng); },
         [](const TensorD& x) {
           TensorD t({3, 4}, std::vector<double>{0.7, 0.3, 0, 0, 0, 0, 1, 0, 0.25, 0.25, 0.25, 0.25});
           return nn::cross_entropy(x, t);
         });

  s.add("generator", "composite", kCompositeTolerance,
        [](util::Rng& rng, GradCheckOptions opts) {
          GeneratorConfig cfg;
          cfg.noise_dim = 3;
          cfg.label_dim = 2;
          cfg.base_channels = 4;
          cfg.start_size = 2;
          cfg.residual_blocks = 1;
          cfg.upsample_channels = {3, 2};
          auto gen = build_generator<double>(cfg);
          gen->initialize(rng);
          opts.max_entries_per_tensor = 24;
          return nn::grad_check(*gen, uniform({4, 5}, -1.0, 1.0, rng), opts);
        });
  s.add("discriminator_losses", "composite", kCompositeTolerance,
        [](util::Rng& rng, const GradCheckOptions& opts) {
          auto disc = small_discriminator(rng);
          TensorD x = uniform({3, 1, 8, 8}, 0.0, 1.0, rng);
          const TensorD real({3, 1}, std::vector<double>{1, 0, 1});
          const std::vector<int> labels{0, 2, 1};
          auto objective = [&] {
            const auto out = disc.forward(x);
            return nn::bce_with_logits(out.adv_logit, real).value +
                   nn::cross_entropy(out.cls_logits, labels).value;
          };
          disc.zero_grad();
          const auto out = disc.forward(x);
          const auto dx = disc.backward(nn::bce_with_logits(out.adv_logit, real).grad,
                                        nn::cross_entropy(out.cls_logits, labels).grad,
                                        nn::ParamGrads::kAccumulate);
          auto targets = disc_targets(disc);
          targets.push_back({"input", &x, dx});
          return nn::check_targets(objective, targets, opts);
        });
  s.add("dragan_penalty", "composite", kCompositeTolerance,
        [](util::Rng& rng, const GradCheckOptions& opts) {
          auto disc = small_discriminator(rng);
          const TensorD real = uniform({3, 1, 8, 8}, 0.0, 1.0, rng);
          const std::uint64_t noise_seed = rng();
          disc.zero_grad();
          dragan_penalty(disc, real, 10.0, 0.5, noise_seed, true);
          return nn::check_targets(
              [&] { return dragan_penalty(disc, real, 10.0, 0.5, noise_seed, false).penalty; },
              disc_targets(disc), opts);
        });
  return s.cases;
}

}  // namespace texvib::gan
