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

#include "texvib/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace texvib::nn {

using util::derive_seed;

namespace {

double project(const Tensor<double>& y, const Tensor<double>& r) {
  double s = 0.0;
  for (std::int64_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

// Path of the first leaf whose training-mode output is non-finite, or empty.
std::string locate_non_finite(Layer<double>& layer, const Tensor<double>& input,
                              const std::string& path, Tensor<double>& out) {
  if (auto* seq = dynamic_cast<Sequential<double>*>(&layer)) {
    Tensor<double> h = input;
    for (std::size_t i = 0; i < seq->size(); ++i) {
      Tensor<double> next;
      std::string where =
          locate_non_finite(seq->at(i), h, path + "/" + std::to_string(i), next);
      if (!where.empty()) return where;
      h = std::move(next);
    }
    out = std::move(h);
    return {};
  }
  out = layer.forward(input);
  if (!out.all_finite()) return path + " " + layer.describe();
  return {};
}

std::vector<std::int64_t> pick_indices(std::int64_t size, std::int64_t limit, util::Rng& rng) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(size));
  std::iota(idx.begin(), idx.end(), 0);
  if (limit > 0 && limit < size) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(limit));
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

}  // namespace

GradCheckReport check_targets(const std::function<double()>& objective,
                              const std::vector<GradTarget>& targets,
                              const GradCheckOptions& options) {
  GradCheckReport report;
  util::Rng rng(derive_seed(options.seed, {1}));
  double scale = 0.0;
  for (const auto& t : targets) {
    for (double g : t.analytic.values()) scale = std::max(scale, std::abs(g));
  }
  const double floor = std::max(1e-6 * scale, 1e-10);
  const double h = options.step;

  for (const auto& t : targets) {
    for (std::int64_t i : pick_indices(t.value->size(), options.max_entries_per_tensor, rng)) {
      const double saved = (*t.value)[i];
      (*t.value)[i] = saved + h;
      const double up = objective();
      (*t.value)[i] = saved - h;
      const double down = objective();
      (*t.value)[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = t.analytic[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), floor});
      ++report.checked;
      if (!std::isfinite(rel)) {
        report.failure = "non-finite difference quotient for '" + t.name + "'";
        return report;
      }
      if (rel > report.max_rel_error || report.worst.index < 0) {
        report.max_rel_error = std::max(report.max_rel_error, rel);
        report.worst = {t.name, i, analytic, numeric, rel};
      }
    }
  }
  report.passed = report.max_rel_error <= options.tolerance;
  return report;
}

GradCheckReport grad_check(Layer<double>& layer, const Tensor<double>& input,
                           const GradCheckOptions& options) {
  GradCheckReport report;
  util::Rng rng(options.seed);
  auto params = parameters(layer);

  std::vector<Tensor<double>> frozen;
  for (auto& p : params) {
    if (!p.param->trainable) frozen.push_back(p.param->value);
  }
  auto restore_frozen = [&] {
    std::size_t k = 0;
    for (auto& p : params) {
      if (!p.param->trainable) p.param->value = frozen[k++];
    }
  };

  Tensor<double> y;
  const std::string where = locate_non_finite(layer, input, "", y);
  if (!where.empty()) {
    restore_frozen();
    report.failure = "non-finite forward output at layer" + where;
    return report;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor<double> r(y.shape());
  for (auto& v : r.values()) v = normal(rng);

  zero_grad(layer);
  layer.forward(input);
  const Tensor<double> dx = layer.backward(r, ParamGrads::kAccumulate);
  if (!dx.all_finite()) {
    restore_frozen();
    report.failure = "non-finite input gradient";
    return report;
  }
  for (auto& p : params) {
    if (p.param->trainable && !p.param->grad.all_finite()) {
      restore_frozen();
      report.failure = "non-finite gradient in parameter '" + p.name + "'";
      return report;
    }
  }

  Tensor<double> x = input;
  std::vector<GradTarget> targets;
  if (options.check_input) targets.push_back({"input", &x, dx});
  for (auto& p : params) {
    if (p.param->trainable) targets.push_back({p.name, &p.param->value, p.param->grad});
  }
  auto objective = [&] { return project(layer.forward(x), r); };
  report = check_targets(objective, targets, options);
  restore_frozen();
  return report;
}

}  // namespace texvib::nn
