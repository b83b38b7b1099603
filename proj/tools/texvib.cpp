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

// texvib: dataset synthesis, training, generation, inversion, evaluation
// and serving from one binary.
//
// Exit codes: 0 success, 2 usage, 3..9 runtime error category (see
// texvib::exit_code). Runtime errors print one line:
//   error: <category>: <detail>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "texvib/codec/griffin_lim.hpp"
#include "texvib/codec/spc1.hpp"
#include "texvib/codec/wav.hpp"
#include "texvib/dataset/ingest.hpp"
#include "texvib/dataset/synthetic.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"
#include "texvib/gan/gradient_suite.hpp"
#include "texvib/pipeline/pipeline.hpp"
#include "texvib/pipeline/report.hpp"
#include "texvib/service/service.hpp"
#include "texvib/util/binary_io.hpp"
#include "texvib/util/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace texvib::cli {
namespace {

constexpr std::uint64_t kGlimSeedStream = 0x676c;

nlohmann::json read_json(const fs::path& path) {
  try {
    return json::parse(util::read_text_file(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

template <typename T>
T parse_json_as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, what + ": " + e.what());
  }
}

std::vector<double> parse_label(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "label entry '" + item + "' is not a number");
    }
  }
  return out;
}

void log_counts(const dataset::Dataset& data, const std::string& what) {
  const auto counts = data.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    spdlog::info("{}: {:>4} x {}", what, counts[k], data.class_names[k]);
  }
  spdlog::info("{}: {} samples total", what, data.size());
}

struct LoadedData {
  dataset::DatasetManifest manifest;
  dataset::Split split;
};

// Uses the split recorded in the manifest when present.
LoadedData load_data(const fs::path& root, double test_fraction, std::uint64_t seed) {
  LoadedData out;
  out.manifest = dataset::read_manifest(root / "manifest.json");
  const auto data = dataset::ingest(root, out.manifest);
  if (out.manifest.split) {
    out.split = dataset::split_by_ids(data, out.manifest.split->test);
  } else {
    spdlog::warn("manifest has no split; splitting {:.2f} with seed {}", test_fraction, seed);
    out.split = dataset::split(data, test_fraction, seed);
  }
  log_counts(out.split.train, "train");
  log_counts(out.split.test, "test");
  return out;
}

codec::NormStats stats_for(const LoadedData& d) {
  if (d.manifest.norm_stats) return *d.manifest.norm_stats;
  spdlog::warn("manifest has no norm stats; computing them from the train split");
  return dataset::compute_norm_stats(d.split.train, d.split.train.codec);
}

void write_generated(const codec::ModelSpectrogram& spec, const codec::Waveform& wave,
                     const std::string& prefix) {
  const fs::path spc = prefix + ".spc1";
  const fs::path wav = prefix + ".wav";
  if (!fs::path(prefix).parent_path().empty()) fs::create_directories(fs::path(prefix).parent_path());
  codec::write_spec(spec, spc);
  codec::write_wav(wave, wav, spec.stats, spec.config);
  spdlog::info("wrote {} and {} ({:.3f} s at {} Hz)", spc.string(), wav.string(), wave.duration_s(),
               wave.sample_rate_hz);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  int classes = 9;
  int per_class = 40;
  std::uint64_t seed = 7;
  double test_fraction = 0.2;
  int length = 40000;
  std::string spec_file;
  std::string out;
};

void run_synth(const SynthArgs& a) {
  dataset::SyntheticSpec spec =
      a.spec_file.empty() ? dataset::SyntheticSpec::standard(a.classes)
                          : parse_json_as<dataset::SyntheticSpec>(read_json(a.spec_file), a.spec_file);
  if (a.spec_file.empty()) {
    spec.samples_per_class = a.per_class;
    spec.signal_length = a.length;
  }
  const auto data = dataset::synthesize_dataset(spec, a.seed);
  const auto sp = dataset::split(data, a.test_fraction, a.seed);
  const auto stats = dataset::compute_norm_stats(sp.train, spec.codec);
  dataset::SplitAssignment assignment{a.seed, a.test_fraction, {}};
  for (const auto& s : sp.test.samples) assignment.test.push_back(dataset::sample_key(s));
  dataset::write_dataset(data, a.out, stats, assignment);
  util::write_text_file(fs::path(a.out) / "synthetic.json", json(spec).dump(2) + "\n");
  log_counts(data, "synthesized");
  spdlog::info("norm stats [{:.4f}, {:.4f}] dB from {} training samples", stats.log_min,
               stats.log_max, sp.train.size());
}

struct IngestArgs {
  std::string root;
  std::string manifest;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  bool write = false;
};

void run_ingest(const IngestArgs& a) {
  const fs::path manifest_path = a.manifest.empty() ? fs::path(a.root) / "manifest.json" : fs::path(a.manifest);
  auto manifest = dataset::read_manifest(manifest_path);
  const auto data = dataset::ingest(a.root, manifest);
  log_counts(data, "ingested");
  json summary{{"total", data.size()}, {"classes", json::array()}};
  const auto counts = data.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    summary["classes"].push_back({{"name", data.class_names[k]}, {"count", counts[k]}});
  }
  if (a.write) {
    const auto sp = dataset::split(data, a.test_fraction, a.seed);
    manifest.norm_stats = dataset::compute_norm_stats(sp.train, manifest.codec);
    dataset::SplitAssignment assignment{a.seed, a.test_fraction, {}};
    for (const auto& s : sp.test.samples) assignment.test.push_back(dataset::sample_key(s));
    manifest.split = assignment;
    dataset::write_manifest(manifest, manifest_path);
    summary["train"] = sp.train.size();
    summary["test"] = sp.test.size();
    spdlog::info("updated {} with split and norm stats", manifest_path.string());
  }
  std::cout << summary.dump(2) << "\n";
}

struct TrainEncoderArgs {
  std::string data;
  std::string out;
  std::string config_json;
  std::string log;
  std::optional<std::uint64_t> seed;  // overrides the config file when given
  int epochs = 0;
  int batch = 0;
  double lr = 0.0;
  double test_fraction = 0.2;
};

void run_train_encoder(const TrainEncoderArgs& a) {
  encoder::EncoderTrainConfig cfg;
  if (!a.config_json.empty()) {
    cfg = parse_json_as<encoder::EncoderTrainConfig>(read_json(a.config_json), a.config_json);
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.epochs > 0) cfg.max_epochs = a.epochs;
  if (a.batch > 0) cfg.batch_size = a.batch;
  if (a.lr > 0) cfg.lr = a.lr;
  cfg.validate();
  spdlog::info("encoder config: {}", json(cfg).dump());
  const auto d = load_data(a.data, a.test_fraction, cfg.seed);
  std::ofstream log;
  if (!a.log.empty()) log.open(a.log);
  auto ckpt = encoder::train_encoder(
      dataset::labeled_images(d.split.train), dataset::labeled_images(d.split.test),
      d.split.train.class_names, cfg, [&](const encoder::EncoderEpochLog& e) {
        spdlog::info("epoch {:>3}  train {:.4f}  val {:.4f}  val_acc {:.3f}  lr {:.1e}", e.epoch,
                     e.train_loss, e.val_loss, e.val_accuracy, e.lr);
        if (log) {
          log << json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss},
                      {"val_accuracy", e.val_accuracy}, {"lr", e.lr}}.dump()
              << "\n";
        }
      });
  spdlog::info("test accuracy {:.4f} after {} epochs", ckpt.test_accuracy, ckpt.epochs);
  encoder::save_encoder(ckpt, a.out);
}

struct TrainGanArgs {
  std::string data;
  std::string out;
  std::string config_json;
  std::string metrics;
  std::string checkpoint_dir;
  std::optional<std::uint64_t> seed;
  std::int64_t steps = 0;
  int batch = 0;
  double lr = 0.0;
  std::int64_t checkpoint_every = -1;
  double test_fraction = 0.2;
};

void run_train_gan(const TrainGanArgs& a) {
  gan::GanTrainConfig cfg;
  if (!a.config_json.empty()) {
    cfg = parse_json_as<gan::GanTrainConfig>(read_json(a.config_json), a.config_json);
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.steps > 0) cfg.steps = a.steps;
  if (a.batch > 0) cfg.batch_size = a.batch;
  if (a.lr > 0) cfg.lr = a.lr;
  if (a.checkpoint_every >= 0) cfg.checkpoint_every = a.checkpoint_every;
  cfg.validate();
  spdlog::info("gan config: {}", json(cfg).dump());
  const auto d = load_data(a.data, a.test_fraction, cfg.seed);
  const auto stats = stats_for(d);
  const auto train = dataset::gan_training_data(d.split.train, stats);
  std::ofstream metrics;
  if (!a.metrics.empty()) metrics.open(a.metrics);
  gan::GanTrainHooks hooks;
  hooks.checkpoint_dir = a.checkpoint_dir;
  hooks.on_metrics = [&](const gan::GanMetrics& m) {
    if (m.step % 10 == 0 || m.step == cfg.steps) {
      spdlog::info("step {:>5}  d {:.4f}  g {:.4f}  aux_real {:.3f}  aux_fake {:.3f}  gp {:.4f}",
                   m.step, m.d_loss, m.g_loss, m.aux_acc_real, m.aux_acc_fake, m.penalty);
    }
    if (metrics) metrics << json(m).dump() << "\n";
  };
  auto ckpt = gan::train_gan(train, cfg, hooks);
  gan::save_gan(ckpt, a.out);
  spdlog::info("wrote {} at step {}", a.out, ckpt.step);
}

struct GenerateArgs {
  std::string ckpt;
  std::string label;
  std::string class_name;
  std::string image;
  std::string encoder;
  std::string mode = "soft";
  std::uint64_t seed = 0;
  int iters = codec::kDefaultGriffinLimIters;
  std::string out = "generated";
};

encoder::EncodeMode parse_mode(const std::string& mode) {
  if (mode == "soft") return encoder::EncodeMode::kSoftmax;
  if (mode == "hard") return encoder::EncodeMode::kHard;
  if (mode == "raw") return encoder::EncodeMode::kRawLogits;
  fail(ErrorCode::kInvalidArgument, "mode must be soft, hard or raw, got '" + mode + "'");
}

void run_generate(const GenerateArgs& a) {
  const auto gan_ckpt = gan::load_gan(a.ckpt);
  const int sources = !a.label.empty() + !a.class_name.empty() + !a.image.empty();
  if (sources != 1) fail(ErrorCode::kInvalidArgument, "give exactly one of --label, --class, --image");
  json echo;
  if (!a.image.empty()) {
    if (a.encoder.empty()) fail(ErrorCode::kInvalidArgument, "--image needs --encoder");
    const auto enc = encoder::load_encoder(a.encoder);
    const auto out = pipeline::generate_from_image(enc, gan_ckpt, encoder::read_image(a.image), a.seed,
                                                   a.iters, parse_mode(a.mode));
    write_generated(out.spectrogram, out.wave, a.out);
    echo = out.label;
  } else {
    std::vector<double> label;
    if (!a.label.empty()) {
      label = parse_label(a.label);
    } else {
      int index = -1;
      for (std::size_t k = 0; k < gan_ckpt.class_names.size(); ++k) {
        if (gan_ckpt.class_names[k] == a.class_name) index = static_cast<int>(k);
      }
      if (index < 0) {
        try {
          index = std::stoi(a.class_name);
        } catch (const std::exception&) {
          fail(ErrorCode::kInvalidArgument, "unknown class '" + a.class_name + "'");
        }
      }
      if (index < 0 || index >= gan_ckpt.label_dim()) {
        fail(ErrorCode::kInvalidArgument, "class index " + std::to_string(index) + " out of range");
      }
      label.assign(gan_ckpt.label_dim(), 0.0);
      label[index] = 1.0;
    }
    const auto out = pipeline::generate_from_label(gan_ckpt, label, a.seed, a.iters);
    write_generated(out.spectrogram, out.wave, a.out);
    echo = label;
  }
  std::cout << json{{"label", echo}, {"seed", a.seed}, {"iters", a.iters}}.dump() << "\n";
}

struct EncodeArgs {
  std::string encoder;
  std::string image;
  std::string mode = "soft";
  std::string out;
};

void run_encode(const EncodeArgs& a) {
  const auto enc = encoder::load_encoder(a.encoder);
  const auto label = encoder::encode(enc, encoder::read_image(a.image), parse_mode(a.mode));
  std::size_t best = 0;
  for (std::size_t k = 1; k < label.size(); ++k) {
    if (label[k] > label[best]) best = k;
  }
  const json out{{"label", label}, {"mode", a.mode}, {"argmax", best},
                 {"class", enc.class_names.at(best)}};
  if (!a.out.empty()) util::write_text_file(a.out, out.dump(2) + "\n");
  std::cout << out.dump() << "\n";
}

struct InvertArgs {
  std::string spec;
  std::string out;
  int iters = codec::kDefaultGriffinLimIters;
  std::uint64_t seed = 0;
};

void run_invert(const InvertArgs& a) {
  if (a.iters < 1) fail(ErrorCode::kInvalidArgument, "--iters must be >= 1");
  const auto spec = codec::read_spec(a.spec);
  const auto mag = codec::from_model_domain(spec, spec.config);
  const auto gl = codec::griffin_lim(mag, spec.config, a.iters, util::derive_seed(a.seed, {kGlimSeedStream}));
  codec::write_wav(gl.wave, a.out, spec.stats, spec.config);
  spdlog::info("wrote {} ({:.3f} s at {} Hz), spectral convergence {:.4f}", a.out,
               gl.wave.duration_s(), gl.wave.sample_rate_hz, gl.errors.empty() ? 0.0 : gl.errors.back());
}

struct EvalArgs {
  std::string encoder;
  std::string gan;
  std::string data;
  std::string out;
  std::string reference = "auto";  // "auto", "data" or a synthetic spec path
  std::uint64_t seed = 0;
  int samples_per_class = 32;
  int max_e2e = 0;
  int iters = codec::kDefaultGriffinLimIters;
  double test_fraction = 0.2;
};

void run_eval(const EvalArgs& a) {
  const auto gan_ckpt = gan::load_gan(a.gan);
  std::optional<encoder::EncoderCheckpoint> enc;
  if (!a.encoder.empty()) enc = encoder::load_encoder(a.encoder);
  const auto d = load_data(a.data, a.test_fraction, a.seed);
  pipeline::EvalConfig cfg;
  cfg.seed = a.seed;
  cfg.samples_per_class = a.samples_per_class;
  cfg.max_e2e_images = a.max_e2e;
  cfg.glim_iters = a.iters;
  fs::path ref = a.reference == "auto" ? fs::path(a.data) / "synthetic.json" : fs::path(a.reference);
  if (a.reference != "data" && fs::exists(ref)) {
    const auto spec = parse_json_as<dataset::SyntheticSpec>(read_json(ref), ref.string());
    for (const auto& c : spec.classes) cfg.reference_hz.push_back(c.center_hz);
    spdlog::info("reference frequencies from {}", ref.string());
  } else if (a.reference != "auto" && a.reference != "data") {
    fail(ErrorCode::kIo, "reference spec " + ref.string() + " does not exist");
  }
  const auto report = pipeline::eval_generated(enc ? &*enc : nullptr, gan_ckpt, d.split.test, cfg);
  if (!a.out.empty()) pipeline::write_report(report, a.out);
  spdlog::info("aux accuracy {:.3f}  signature match {:.3f} (chance {:.3f})  separation {:.3f}",
               report.aux_accuracy, report.signature_match_rate, report.chance_rate,
               report.separation_score);
  if (report.e2e) {
    spdlog::info("image path: {} images, encoder accuracy {:.3f}, signature match {:.3f}",
                 report.e2e->images, report.e2e->encoder_accuracy, report.e2e->signature_match_rate);
  }
  std::cout << json(report).dump(2) << "\n";
}

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

void run_serve(const service::ServiceConfig& cfg) {
  std::shared_ptr<const service::Handlers> handlers;
  try {
    handlers = std::make_shared<const service::Handlers>(service::load_handlers(cfg));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMismatch) {
      throw Error(e.code(), std::string(e.what()) + " (startup refused, 422)");
    }
    throw;
  }
  service::Server server(handlers);
  const int port = server.bind();
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  spdlog::info("serving {} classes on http://{}:{}", handlers->gan().class_names.size(), cfg.host, port);
  server.run();
  g_server = nullptr;
  spdlog::info("server stopped");
}

struct GradcheckArgs {
  std::uint64_t seed = 1;
  std::string filter;
};

void run_gradcheck(const GradcheckArgs& a) {
  const auto cases = gan::run_gradient_suite(a.seed, a.filter);
  if (cases.empty()) fail(ErrorCode::kInvalidArgument, "no gradient case matches '" + a.filter + "'");
  int failed = 0;
  for (const auto& c : cases) {
    const bool ok = c.passed();
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << c.group << " " << c.name << " max_rel_error="
              << c.report.max_rel_error << " tolerance=" << c.tolerance << " checked=" << c.report.checked;
    if (!c.report.failure.empty()) std::cout << " failure=\"" << c.report.failure << "\"";
    if (!ok && c.report.failure.empty()) {
      std::cout << " worst=" << c.report.worst.tensor << "[" << c.report.worst.index
                << "] analytic=" << c.report.worst.analytic << " numeric=" << c.report.worst.numeric;
    }
    std::cout << "\n";
  }
  if (failed > 0) {
    fail(ErrorCode::kNumeric, std::to_string(failed) + " of " + std::to_string(cases.size()) +
                                  " gradient checks failed");
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("texvib");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("TEXVIB_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

int run(int argc, char** argv) {
  CLI::App app{"texvib: texture-conditioned vibration synthesis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with flag defaults; flags on the command line win");
  app.set_version_flag("--version", "texvib 0.1.0");

  SynthArgs synth;
  auto* sc = app.add_subcommand("synth-dataset", "write a synthetic paired dataset");
  sc->add_option("--classes", synth.classes, "number of classes (2..9)")->capture_default_str();
  sc->add_option("--per-class", synth.per_class, "samples per class")->capture_default_str();
  sc->add_option("--seed", synth.seed)->capture_default_str();
  sc->add_option("--test-fraction", synth.test_fraction)->capture_default_str();
  sc->add_option("--length", synth.length, "signal length in samples")->capture_default_str();
  sc->add_option("--spec-file", synth.spec_file, "JSON synthetic spec (overrides the above)");
  sc->add_option("--out", synth.out, "output directory")->required();
  sc->callback([&] { run_synth(synth); });

  IngestArgs ingest;
  auto* ic = app.add_subcommand("ingest", "validate a dataset tree and report per-class counts");
  ic->add_option("--root", ingest.root)->required();
  ic->add_option("--manifest", ingest.manifest, "default: <root>/manifest.json");
  ic->add_option("--test-fraction", ingest.test_fraction)->capture_default_str();
  ic->add_option("--seed", ingest.seed)->capture_default_str();
  ic->add_flag("--write", ingest.write, "record a split and train norm stats in the manifest");
  ic->callback([&] { run_ingest(ingest); });

  TrainEncoderArgs te;
  auto* tec = app.add_subcommand("train-encoder", "train the image encoder");
  tec->add_option("--data", te.data)->required();
  tec->add_option("--out", te.out)->required();
  tec->add_option("--train-config", te.config_json, "JSON encoder training config");
  tec->add_option("--log", te.log, "JSON-lines epoch log");
  tec->add_option("--seed", te.seed, "default: config seed (1)");
  tec->add_option("--epochs", te.epochs, "maximum epochs");
  tec->add_option("--batch", te.batch);
  tec->add_option("--lr", te.lr);
  tec->add_option("--test-fraction", te.test_fraction, "used when the manifest has no split");
  tec->callback([&] { run_train_encoder(te); });

  TrainGanArgs tg;
  auto* tgc = app.add_subcommand("train-gan", "train the conditional generator");
  tgc->add_option("--data", tg.data)->required();
  tgc->add_option("--out", tg.out)->required();
  tgc->add_option("--train-config", tg.config_json, "JSON GAN training config");
  tgc->add_option("--metrics", tg.metrics, "JSON-lines per-step metrics");
  tgc->add_option("--checkpoint-dir", tg.checkpoint_dir);
  tgc->add_option("--checkpoint-every", tg.checkpoint_every);
  tgc->add_option("--seed", tg.seed, "default: config seed (1)");
  tgc->add_option("--steps", tg.steps);
  tgc->add_option("--batch", tg.batch);
  tgc->add_option("--lr", tg.lr);
  tgc->add_option("--test-fraction", tg.test_fraction, "used when the manifest has no split");
  tgc->callback([&] { run_train_gan(tg); });

  GenerateArgs gen;
  auto* gc = app.add_subcommand("generate", "generate a spectrogram and waveform");
  gc->add_option("--ckpt", gen.ckpt, "GAN checkpoint")->required();
  gc->add_option("--label", gen.label, "comma-separated label vector");
  gc->add_option("--class", gen.class_name, "class name or index");
  gc->add_option("--image", gen.image, "texture image (needs --encoder)");
  gc->add_option("--encoder", gen.encoder);
  gc->add_option("--mode", gen.mode, "soft or hard encoder label")->capture_default_str();
  gc->add_option("--seed", gen.seed)->capture_default_str();
  gc->add_option("--iters", gen.iters, "Griffin-Lim iterations")->capture_default_str();
  gc->add_option("--out", gen.out, "output prefix for .spc1 and .wav")->capture_default_str();
  gc->callback([&] { run_generate(gen); });

  EncodeArgs enc;
  auto* ec = app.add_subcommand("encode", "map a texture image to a label vector");
  ec->add_option("--encoder", enc.encoder)->required();
  ec->add_option("--image", enc.image)->required();
  ec->add_option("--mode", enc.mode, "soft, hard or raw")->capture_default_str();
  ec->add_option("--out", enc.out, "also write the JSON here");
  ec->callback([&] { run_encode(enc); });

  InvertArgs inv;
  auto* vc = app.add_subcommand("invert", "Griffin-Lim inversion of an SPC1 spectrogram");
  vc->add_option("--spec", inv.spec)->required();
  vc->add_option("--out", inv.out)->required();
  vc->add_option("--iters", inv.iters)->capture_default_str();
  vc->add_option("--seed", inv.seed)->capture_default_str();
  vc->callback([&] { run_invert(inv); });

  EvalArgs ev;
  auto* evc = app.add_subcommand("eval", "score generated samples against the test split");
  evc->add_option("--gan", ev.gan)->required();
  evc->add_option("--encoder", ev.encoder, "also evaluate the image path");
  evc->add_option("--data", ev.data)->required();
  evc->add_option("--out", ev.out, "report path");
  evc->add_option("--reference", ev.reference,
                  "auto (data/synthetic.json if present), data, or a synthetic spec path")
      ->capture_default_str();
  evc->add_option("--seed", ev.seed)->capture_default_str();
  evc->add_option("--samples-per-class", ev.samples_per_class)->capture_default_str();
  evc->add_option("--max-e2e", ev.max_e2e, "cap on test images for the image path (0 = all)");
  evc->add_option("--iters", ev.iters)->capture_default_str();
  evc->callback([&] { run_eval(ev); });

  service::ServiceConfig svc;
  std::string svc_encoder, svc_gan;
  auto* svcc = app.add_subcommand("serve", "HTTP API over frozen checkpoints");
  svcc->add_option("--encoder", svc_encoder)->required();
  svcc->add_option("--gan", svc_gan)->required();
  svcc->add_option("--host", svc.host)->capture_default_str();
  svcc->add_option("--port", svc.port)->capture_default_str();
  svcc->add_option("--iters", svc.glim_iters, "default Griffin-Lim iterations")->capture_default_str();
  svcc->add_option("--max-iters", svc.max_glim_iters)->capture_default_str();
  svcc->add_option("--max-upload", svc.max_upload_bytes, "bytes")->capture_default_str();
  svcc->add_option("--cors-origin", svc.cors_origin)->capture_default_str();
  svcc->add_option("--threads", svc.threads)->capture_default_str();
  svcc->callback([&] {
    svc.encoder_path = svc_encoder;
    svc.gan_path = svc_gan;
    run_serve(svc);
  });

  GradcheckArgs gca;
  auto* gcc = app.add_subcommand("gradcheck", "finite-difference checks of every layer and loss");
  gcc->add_option("--seed", gca.seed)->capture_default_str();
  gcc->add_option("--filter", gca.filter, "run cases whose name contains this");
  gcc->callback([&] { run_gradcheck(gca); });

  app.parse_complete_callback([&] {
    spdlog::info("resolved flags:\n{}", app.config_to_str(true, false));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace texvib::cli

int main(int argc, char** argv) {
  texvib::cli::setup_logging();
  try {
    return texvib::cli::run(argc, argv);
  } catch (const texvib::Error& e) {
    std::cerr << "error: " << texvib::to_string(e.code()) << ": " << e.what() << "\n";
    return texvib::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << texvib::to_string(texvib::ErrorCode::kInternal) << ": " << e.what() << "\n";
    return texvib::exit_code(texvib::ErrorCode::kInternal);
  }
}
