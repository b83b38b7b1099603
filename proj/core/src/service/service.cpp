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

#include "texvib/service/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>

#include "texvib/codec/spc1.hpp"
#include "texvib/codec/wav.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/pipeline/pipeline.hpp"
#include "texvib/util/base64.hpp"

namespace texvib::service {

namespace {

using nlohmann::json;

Reply ok(json body) {
  body["schema_version"] = kApiVersion;
  return {200, body.dump()};
}

// Errors caused by the request map to 400; anything else is the server's fault.
Reply from_error(const Error& e, const std::string& client_code) {
  switch (e.code()) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDimension:
    case ErrorCode::kFormat:
      return error_reply(400, client_code, e.what());
    default: {
      auto r = error_reply(500, "internal", e.what());
      auto j = json::parse(r.body);
      j["category"] = to_string(e.code());
      r.body = j.dump();
      return r;
    }
  }
}

json encode_output(const codec::ModelSpectrogram& spec, const codec::Waveform& wave) {
  const auto wav = codec::encode_wav(wave);
  return json{{"spectrogram", util::base64_encode(codec::encode_spc1(spec))},
              {"wav", util::base64_encode(wav.bytes)},
              {"wav_scale_factor", wav.scale_factor},
              {"sample_rate_hz", wave.sample_rate_hz},
              {"duration_s", wave.duration_s()}};
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && p == end && !text.empty();
}

}  // namespace

void ServiceConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::kInvalidArgument, "service config: " + what);
  };
  require(port >= 0 && port <= 65535, "port must be in [0, 65535]");
  require(glim_iters >= 1 && glim_iters <= max_glim_iters, "glim_iters must be in [1, max_glim_iters]");
  require(max_upload_bytes >= 1024, "max_upload_bytes must be at least 1024");
  require(threads >= 1, "threads must be positive");
  require(!host.empty(), "host must be non-empty");
}

void to_json(nlohmann::json& j, const ServiceConfig& c) {
  j = json{{"host", c.host},
           {"port", c.port},
           {"encoder", c.encoder_path.string()},
           {"gan", c.gan_path.string()},
           {"glim_iters", c.glim_iters},
           {"max_glim_iters", c.max_glim_iters},
           {"max_upload_bytes", c.max_upload_bytes},
           {"cors_origin", c.cors_origin},
           {"threads", c.threads}};
}

void from_json(const nlohmann::json& j, ServiceConfig& c) {
  ServiceConfig out;
  out.host = j.value("host", out.host);
  out.port = j.value("port", out.port);
  out.encoder_path = j.value("encoder", std::string());
  out.gan_path = j.value("gan", std::string());
  out.glim_iters = j.value("glim_iters", out.glim_iters);
  out.max_glim_iters = j.value("max_glim_iters", out.max_glim_iters);
  out.max_upload_bytes = j.value("max_upload_bytes", out.max_upload_bytes);
  out.cors_origin = j.value("cors_origin", out.cors_origin);
  out.threads = j.value("threads", out.threads);
  c = out;
}

Reply error_reply(int status, const std::string& code, const std::string& detail) {
  return {status,
          json{{"schema_version", kApiVersion}, {"error", code}, {"detail", detail}}.dump()};
}

Handlers::Handlers(encoder::EncoderCheckpoint enc, gan::GanCheckpoint gan, ServiceConfig cfg)
    : enc_(std::move(enc)), gan_(std::move(gan)), cfg_(std::move(cfg)) {
  cfg_.validate();
  pipeline::check_compatible(enc_, gan_);
}

Handlers load_handlers(const ServiceConfig& cfg) {
  cfg.validate();
  return Handlers(encoder::load_encoder(cfg.encoder_path), gan::load_gan(cfg.gan_path), cfg);
}

Reply Handlers::health() const {
  return ok({{"status", "ok"},
             {"checkpoint_step", gan_.step},
             {"classes", gan_.class_names.size()}});
}

Reply Handlers::classes() const { return ok({{"classes", gan_.class_names}}); }

Reply Handlers::generate(const std::string& json_body) const {
  json req;
  try {
    req = json::parse(json_body);
  } catch (const json::exception& e) {
    return error_reply(400, "bad_request", std::string("body is not JSON: ") + e.what());
  }
  if (!req.is_object() || !req.contains("label") || !req["label"].is_array()) {
    return error_reply(400, "bad_label", "body needs a 'label' array");
  }
  std::vector<double> label;
  for (const auto& v : req["label"]) {
    if (!v.is_number()) return error_reply(400, "bad_label", "label entries must be numbers");
    label.push_back(v.get<double>());
  }
  if (static_cast<int>(label.size()) != gan_.label_dim()) {
    return error_reply(400, "bad_label", "label has " + std::to_string(label.size()) +
                                             " entries, expected " + std::to_string(gan_.label_dim()));
  }
  const auto violation = gan::simplex_violation(label, kLabelTolerance);
  if (!violation.empty()) return error_reply(400, "label_not_simplex", "label vector " + violation);
  // Within tolerance: project exactly onto the simplex before generation.
  double sum = 0.0;
  for (auto& v : label) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (auto& v : label) v /= sum;

  std::uint64_t seed = 0;
  if (req.contains("seed")) {
    if (!req["seed"].is_number_integer() || req["seed"].get<std::int64_t>() < 0) {
      return error_reply(400, "bad_request", "seed must be a non-negative integer");
    }
    seed = req["seed"].get<std::uint64_t>();
  }
  int iters = cfg_.glim_iters;
  if (req.contains("iters")) {
    if (!req["iters"].is_number_integer()) return error_reply(400, "bad_request", "iters must be an integer");
    const auto it = req["iters"].get<std::int64_t>();
    if (it < 1 || it > cfg_.max_glim_iters) {
      return error_reply(400, "bad_request",
                         "iters must be in [1, " + std::to_string(cfg_.max_glim_iters) + "]");
    }
    iters = static_cast<int>(it);
  }
  try {
    const auto out = pipeline::generate_from_label(gan_, label, seed, iters);
    json body = encode_output(out.spectrogram, out.wave);
    body["label_echo"] = label;
    body["seed"] = seed;
    body["iters"] = iters;
    return ok(std::move(body));
  } catch (const Error& e) {
    return from_error(e, "bad_request");
  }
}

Reply Handlers::generate_from_image(const std::vector<std::uint8_t>& image, std::uint64_t seed,
                                    int iters, const std::string& mode) const {
  if (image.size() > cfg_.max_upload_bytes) {
    return error_reply(413, "payload_too_large",
                       "upload exceeds " + std::to_string(cfg_.max_upload_bytes) + " bytes");
  }
  if (iters < 1 || iters > cfg_.max_glim_iters) {
    return error_reply(400, "bad_request",
                       "iters must be in [1, " + std::to_string(cfg_.max_glim_iters) + "]");
  }
  encoder::EncodeMode m;
  if (mode == "soft") {
    m = encoder::EncodeMode::kSoftmax;
  } else if (mode == "hard") {
    m = encoder::EncodeMode::kHard;
  } else {
    return error_reply(400, "bad_request", "mode must be 'soft' or 'hard'");
  }
  encoder::TextureImage img;
  try {
    img = encoder::decode_image(image);
  } catch (const Error& e) {
    return error_reply(400, "bad_image", e.what());
  }
  try {
    const auto out = pipeline::generate_from_image(enc_, gan_, img, seed, iters, m);
    json body = encode_output(out.spectrogram, out.wave);
    body["label"] = out.label;
    body["seed"] = seed;
    body["iters"] = iters;
    return ok(std::move(body));
  } catch (const Error& e) {
    return from_error(e, "bad_image");
  }
}

struct Server::Impl {
  std::shared_ptr<const Handlers> handlers;
  httplib::Server http;
};

namespace {

void send(httplib::Response& res, const Reply& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

// Reads a multipart field or, failing that, a query parameter.
std::string field(const httplib::Request& req, const std::string& name, const std::string& def) {
  if (req.has_file(name)) return req.get_file_value(name).content;
  if (req.has_param(name)) return req.get_param_value(name);
  return def;
}

}  // namespace

Server::Server(std::shared_ptr<const Handlers> handlers) : impl_(std::make_unique<Impl>()) {
  impl_->handlers = std::move(handlers);
  const auto& cfg = impl_->handlers->config();
  auto& http = impl_->http;
  const auto h = impl_->handlers;
  const int threads = cfg.threads;
  http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  http.set_payload_max_length(cfg.max_upload_bytes);

  http.Get("/health", [h](const httplib::Request&, httplib::Response& res) { send(res, h->health()); });
  http.Get("/classes", [h](const httplib::Request&, httplib::Response& res) { send(res, h->classes()); });
  http.Post("/generate", [h](const httplib::Request& req, httplib::Response& res) {
    send(res, h->generate(req.body));
  });
  http.Post("/generate-from-image", [h](const httplib::Request& req, httplib::Response& res) {
    std::vector<std::uint8_t> bytes;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("image")) {
        send(res, error_reply(400, "bad_image", "multipart body needs an 'image' part"));
        return;
      }
      const auto& content = req.get_file_value("image").content;
      bytes.assign(content.begin(), content.end());
    } else {
      bytes.assign(req.body.begin(), req.body.end());
    }
    std::uint64_t seed = 0, iters = 0;
    if (!parse_u64(field(req, "seed", "0"), seed) ||
        !parse_u64(field(req, "iters", std::to_string(h->config().glim_iters)), iters)) {
      send(res, error_reply(400, "bad_request", "seed and iters must be non-negative integers"));
      return;
    }
    const auto capped = static_cast<int>(std::min<std::uint64_t>(iters, 1u << 30));
    send(res, h->generate_from_image(bytes, seed, capped, field(req, "mode", "soft")));
  });
  http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    std::string code = "http_error";
    if (res.status == 404) code = "not_found";
    if (res.status == 413) code = "payload_too_large";
    if (res.status == 400) code = "bad_request";
    send(res, error_reply(res.status, code, "HTTP " + std::to_string(res.status)));
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string detail = "unknown failure";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      detail = e.what();
    } catch (...) {
    }
    send(res, error_reply(500, "internal", detail));
  });
  const std::string origin = cfg.cors_origin;
  http.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    if (!origin.empty()) res.set_header("Access-Control-Allow-Origin", origin);
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  const auto& cfg = impl_->handlers->config();
  int port = cfg.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(cfg.host);
    if (port <= 0) fail(ErrorCode::kIo, "cannot bind " + cfg.host + " on any port");
  } else if (!impl_->http.bind_to_port(cfg.host, port)) {
    fail(ErrorCode::kIo, "cannot bind " + cfg.host + ":" + std::to_string(port));
  }
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace texvib::service
