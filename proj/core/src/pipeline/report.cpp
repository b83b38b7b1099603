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

#include "texvib/pipeline/report.hpp"

#include <cmath>

#include "texvib/codec/model_domain.hpp"
#include "texvib/codec/stft.hpp"
#include "texvib/error.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/nn/losses.hpp"
#include "texvib/pipeline/pipeline.hpp"
#include "texvib/pipeline/signature.hpp"
#include "texvib/util/binary_io.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::pipeline {

namespace {

double l2(const codec::ModelMatrix& a, const codec::ModelMatrix& b) {
  return (a.cast<double>() - b.cast<double>()).norm();
}

}  // namespace

void to_json(nlohmann::json& j, const EvalReport& r) {
  auto cls = nlohmann::json::array();
  for (const auto& c : r.classes) {
    cls.push_back({{"name", c.name},
                   {"reference_hz", c.reference_hz},
                   {"generated", c.generated},
                   {"test", c.test},
                   {"aux_accuracy", c.aux_accuracy},
                   {"signature_match_rate", c.signature_match_rate},
                   {"mean_l2_to_test", c.mean_l2_to_test}});
  }
  j = nlohmann::json{{"schema", r.schema},
                     {"classes", cls},
                     {"aux_accuracy", r.aux_accuracy},
                     {"signature_match_rate", r.signature_match_rate},
                     {"chance_rate", r.chance_rate},
                     {"separation_score", r.separation_score},
                     {"inter_class_distance", r.inter_class_distance},
                     {"intra_class_distance", r.intra_class_distance},
                     {"tolerance_bins", r.tolerance_bins}};
  if (r.e2e) {
    j["e2e"] = {{"images", r.e2e->images},
                {"encoder_accuracy", r.e2e->encoder_accuracy},
                {"signature_match_rate", r.e2e->signature_match_rate}};
  }
}

void from_json(const nlohmann::json& j, EvalReport& r) {
  EvalReport out;
  out.schema = j.at("schema").get<std::string>();
  if (out.schema != kReportSchema) {
    fail(ErrorCode::kFormat, "report schema '" + out.schema + "' is not " + kReportSchema);
  }
  for (const auto& c : j.at("classes")) {
    ClassReport cr;
    cr.name = c.at("name").get<std::string>();
    cr.reference_hz = c.at("reference_hz").get<double>();
    cr.generated = c.at("generated").get<int>();
    cr.test = c.at("test").get<int>();
    cr.aux_accuracy = c.at("aux_accuracy").get<double>();
    cr.signature_match_rate = c.at("signature_match_rate").get<double>();
    cr.mean_l2_to_test = c.at("mean_l2_to_test").get<double>();
    out.classes.push_back(cr);
  }
  out.aux_accuracy = j.at("aux_accuracy").get<double>();
  out.signature_match_rate = j.at("signature_match_rate").get<double>();
  out.chance_rate = j.at("chance_rate").get<double>();
  out.separation_score = j.at("separation_score").get<double>();
  out.inter_class_distance = j.at("inter_class_distance").get<double>();
  out.intra_class_distance = j.at("intra_class_distance").get<double>();
  out.tolerance_bins = j.at("tolerance_bins").get<double>();
  if (j.contains("e2e")) {
    const auto& e = j.at("e2e");
    out.e2e = E2EReport{e.at("images").get<int>(), e.at("encoder_accuracy").get<double>(),
                        e.at("signature_match_rate").get<double>()};
  }
  r = out;
}

void write_report(const EvalReport& r, const std::filesystem::path& path) {
  util::write_text_file(path, nlohmann::json(r).dump(2) + "\n");
}

EvalReport read_report(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(util::read_text_file(path)).get<EvalReport>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

double separation_score(const std::vector<codec::ModelMatrix>& generated_means,
                        const std::vector<codec::ModelMatrix>& test_means, double* inter,
                        double* intra) {
  const auto k = generated_means.size();
  if (k < 2 || test_means.size() != k) {
    fail(ErrorCode::kDimension, "separation_score: need >= 2 classes on both sides");
  }
  double sum_inter = 0.0, sum_intra = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const double d = l2(generated_means[a], test_means[b]);
      (a == b ? sum_intra : sum_inter) += d;
    }
  }
  const double mean_inter = sum_inter / static_cast<double>(k * (k - 1));
  const double mean_intra = sum_intra / static_cast<double>(k);
  if (inter) *inter = mean_inter;
  if (intra) *intra = mean_intra;
  if (!(mean_intra > 0.0)) return std::numeric_limits<double>::infinity();
  return mean_inter / mean_intra;
}

EvalReport eval_generated(const encoder::EncoderCheckpoint* enc, const gan::GanCheckpoint& gan,
                          const dataset::Dataset& test, const EvalConfig& cfg) {
  if (cfg.samples_per_class < 1) fail(ErrorCode::kInvalidArgument, "samples_per_class must be >= 1");
  if (test.class_names != gan.class_names) {
    fail(ErrorCode::kMismatch, "test dataset classes differ from the generator's class list");
  }
  if (test.codec.sample_rate_hz != gan.codec.sample_rate_hz) {
    fail(ErrorCode::kMismatch, "test dataset rate " + std::to_string(test.codec.sample_rate_hz) +
                                   " Hz differs from the checkpoint rate " +
                                   std::to_string(gan.codec.sample_rate_hz) + " Hz");
  }
  if (enc) check_compatible(*enc, gan);
  const int k_classes = static_cast<int>(gan.class_names.size());
  if (!cfg.reference_hz.empty() && static_cast<int>(cfg.reference_hz.size()) != k_classes) {
    fail(ErrorCode::kDimension, "reference_hz has " + std::to_string(cfg.reference_hz.size()) +
                                    " entries for " + std::to_string(k_classes) + " classes");
  }

  std::vector<std::vector<codec::ModelMatrix>> test_by_class(k_classes);
  for (const auto& s : test.samples) {
    test_by_class.at(s.class_index)
        .push_back(codec::to_model_domain(codec::stft(s.wave, gan.codec), gan.stats, gan.codec).data);
  }
  for (int k = 0; k < k_classes; ++k) {
    if (test_by_class[k].empty()) {
      fail(ErrorCode::kInvalidArgument, "test dataset has no samples of class '" + gan.class_names[k] + "'");
    }
  }

  EvalReport report;
  report.tolerance_bins = cfg.tolerance_bins;
  report.chance_rate = 1.0 / k_classes;
  std::vector<codec::ModelMatrix> gen_means, test_means;
  std::vector<double> reference_hz;
  int total = 0, aux_hits = 0, match_hits = 0;
  for (int k = 0; k < k_classes; ++k) {
    ClassReport cr;
    cr.name = gan.class_names[k];
    cr.test = static_cast<int>(test_by_class[k].size());
    test_means.push_back(mean_spectrogram(test_by_class[k]));
    cr.reference_hz = cfg.reference_hz.empty() ? gan.codec.row_to_hz(dominant_row(test_means.back()))
                                               : cfg.reference_hz[k];
    reference_hz.push_back(cr.reference_hz);

    const int n = cfg.samples_per_class;
    const auto z = gan::sample_noise(n, gan.noise_dim(), util::derive_seed(cfg.seed, {0, std::uint64_t(k)}));
    const auto c = gan::one_hot(std::vector<int>(n, k), gan.label_dim());
    const auto batch = gan::generator_forward(*gan.generator, z, c);
    const auto [prob, cls_logits] = gan::discriminator_forward(gan.discriminator, batch);
    const auto predicted = nn::argmax_rows(cls_logits);
    const auto specs = gan::to_spectrograms(batch, gan);

    std::vector<codec::ModelMatrix> generated;
    int aux = 0, match = 0;
    for (int i = 0; i < n; ++i) {
      aux += predicted[i] == k ? 1 : 0;
      const double hz = gan.codec.row_to_hz(dominant_row(specs[i].data));
      match += within_bins(hz, cr.reference_hz, gan.codec, cfg.tolerance_bins) ? 1 : 0;
      generated.push_back(specs[i].data);
    }
    gen_means.push_back(mean_spectrogram(generated));
    cr.generated = n;
    cr.aux_accuracy = static_cast<double>(aux) / n;
    cr.signature_match_rate = static_cast<double>(match) / n;
    cr.mean_l2_to_test = l2(gen_means.back(), test_means.back());
    total += n;
    aux_hits += aux;
    match_hits += match;
    report.classes.push_back(cr);
  }
  report.aux_accuracy = static_cast<double>(aux_hits) / total;
  report.signature_match_rate = static_cast<double>(match_hits) / total;
  report.separation_score = separation_score(gen_means, test_means, &report.inter_class_distance,
                                             &report.intra_class_distance);

  if (enc) {
    E2EReport e2e;
    int correct = 0, matched = 0;
    for (std::size_t i = 0; i < test.samples.size(); ++i) {
      if (cfg.max_e2e_images > 0 && e2e.images >= cfg.max_e2e_images) break;
      const auto& s = test.samples[i];
      const auto out = generate_from_image(*enc, gan, *s.image, util::derive_seed(cfg.seed, {1, i}),
                                           cfg.glim_iters);
      int argmax = 0;
      for (std::size_t j = 1; j < out.label.size(); ++j) {
        if (out.label[j] > out.label[argmax]) argmax = static_cast<int>(j);
      }
      correct += argmax == s.class_index ? 1 : 0;
      const double hz = dominant_frequency_hz(out.wave);
      matched += within_bins(hz, reference_hz[s.class_index], gan.codec, cfg.tolerance_bins) ? 1 : 0;
      ++e2e.images;
    }
    if (e2e.images > 0) {
      e2e.encoder_accuracy = static_cast<double>(correct) / e2e.images;
      e2e.signature_match_rate = static_cast<double>(matched) / e2e.images;
    }
    report.e2e = e2e;
  }
  return report;
}

}  // namespace texvib::pipeline
