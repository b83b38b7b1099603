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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "texvib/encoder/encoder.hpp"
#include "texvib/gan/checkpoint.hpp"

namespace texvib::service {

inline constexpr const char* kApiVersion = "api-v1";
inline constexpr double kLabelTolerance = 1e-3;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path encoder_path;
  std::filesystem::path gan_path;
  int glim_iters = 60;
  int max_glim_iters = 500;
  std::size_t max_upload_bytes = 8u << 20;
  std::string cors_origin = "*";
  int threads = 4;

  void validate() const;
};

void to_json(nlohmann::json& j, const ServiceConfig& c);
void from_json(const nlohmann::json& j, ServiceConfig& c);

struct Reply {
  int status = 200;
  std::string body;  // JSON
};

/// Request handling over frozen checkpoints. Every handler is const and
/// safe to call from several threads at once.
class Handlers {
 public:
  /// Throws kMismatch when the two class lists differ; the server refuses
  /// to start in that case.
  Handlers(encoder::EncoderCheckpoint enc, gan::GanCheckpoint gan, ServiceConfig cfg);

  Reply health() const;
  Reply classes() const;
  /// Body: {"label": [K floats], "seed": int, "iters"?: int}.
  Reply generate(const std::string& json_body) const;
  /// `image` is PNG or BMP bytes; `mode` is "soft" or "hard".
  Reply generate_from_image(const std::vector<std::uint8_t>& image, std::uint64_t seed,
                            int iters, const std::string& mode) const;

  const ServiceConfig& config() const { return cfg_; }
  const gan::GanCheckpoint& gan() const { return gan_; }

 private:
  encoder::EncoderCheckpoint enc_;
  gan::GanCheckpoint gan_;
  ServiceConfig cfg_;
};

/// Loads both checkpoints named in `cfg`.
Handlers load_handlers(const ServiceConfig& cfg);

/// {"schema_version": "api-v1", "error": code, "detail": detail}.
Reply error_reply(int status, const std::string& code, const std::string& detail);

/// HTTP front end. bind() then run() (blocking) from one thread; stop()
/// from any thread.
class Server {
 public:
  explicit Server(std::shared_ptr<const Handlers> handlers);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Returns the bound port (useful with port 0). Throws kIo on failure.
  int bind();
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace texvib::service
