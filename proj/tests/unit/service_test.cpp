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

#include <gtest/gtest.h>

#include <future>
#include <nlohmann/json.hpp>
#include <thread>

#include "test_support.hpp"
#include "texvib/codec/spc1.hpp"
#include "texvib/codec/wav.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"
#include "texvib/service/service.hpp"
#include "texvib/util/base64.hpp"

// After the Eigen-based headers: <resolv.h> defines _res.
#include <httplib.h>

namespace texvib::service {
namespace {

using nlohmann::json;

std::shared_ptr<Handlers> make_handlers(std::size_t max_upload = 8u << 20) {
  ServiceConfig cfg;
  cfg.glim_iters = 3;
  cfg.max_glim_iters = 10;
  cfg.max_upload_bytes = max_upload;
  cfg.threads = 2;
  cfg.port = 0;
  return std::make_shared<Handlers>(testing::tiny_encoder(1), testing::tiny_gan(2), cfg);
}

std::string label_body(std::vector<double> label, int seed) {
  return json{{"label", label}, {"seed", seed}}.dump();
}

std::vector<double> one_hot(int k) {
  std::vector<double> v(9, 0.0);
  v[k] = 1.0;
  return v;
}

std::vector<std::uint8_t> test_png() {
  return encoder::encode_png(dataset::synthesize_image(testing::small_spec(1), 3, 4));
}

TEST(Handlers, HealthAndClasses) {
  const auto h = make_handlers();
  const auto health = json::parse(h->health().body);
  EXPECT_EQ(health["status"], "ok");
  EXPECT_EQ(health["schema_version"], kApiVersion);
  const auto classes = h->classes();
  EXPECT_EQ(classes.status, 200);
  EXPECT_EQ(json::parse(classes.body)["classes"].get<std::vector<std::string>>(),
            testing::standard_names());
}

TEST(Handlers, GenerateIsDeterministicAndDecodable) {
  const auto h = make_handlers();
  const auto a = h->generate(label_body(one_hot(4), 11));
  ASSERT_EQ(a.status, 200) << a.body;
  EXPECT_EQ(h->generate(label_body(one_hot(4), 11)).body, a.body);
  EXPECT_NE(h->generate(label_body(one_hot(4), 12)).body, a.body);
  const auto j = json::parse(a.body);
  const auto spec = codec::decode_spc1(util::base64_decode(j["spectrogram"].get<std::string>()));
  EXPECT_EQ(spec.data.rows(), 128);
  const auto wav = codec::decode_wav(util::base64_decode(j["wav"].get<std::string>()),
                                     j["wav_scale_factor"].get<double>());
  EXPECT_EQ(wav.sample_rate_hz, 10000);
  EXPECT_NEAR(j["duration_s"].get<double>(), 1.6768, 1e-9);
  EXPECT_EQ(j["seed"], 11);
  EXPECT_EQ(j["iters"], 3);
}

TEST(Handlers, LabelValidation) {
  const auto h = make_handlers();
  std::vector<double> over(9, 0.0);
  over[0] = 1.2;
  const auto bad = h->generate(label_body(over, 1));
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(json::parse(bad.body)["error"], "label_not_simplex");

  std::vector<double> near(9, 0.0);
  near[0] = 0.6;
  near[1] = 0.4005;  // sums to 1.0005, inside the service tolerance
  const auto ok = h->generate(label_body(near, 1));
  ASSERT_EQ(ok.status, 200) << ok.body;
  EXPECT_NEAR(json::parse(ok.body)["label_echo"][0].get<double>(), 0.6 / 1.0005, 1e-12);

  EXPECT_EQ(h->generate("not json").status, 400);
  EXPECT_EQ(h->generate(label_body({1.0, 0.0}, 1)).status, 400);
  EXPECT_EQ(h->generate(R"({"label":[1,0,0,0,0,0,0,0,0],"iters":1000})").status, 400);
  EXPECT_EQ(h->generate(R"({"label":[1,0,0,0,0,0,0,0,0],"seed":-1})").status, 400);
}

TEST(Handlers, ImageRoute) {
  const auto h = make_handlers();
  const auto png = test_png();
  const auto a = h->generate_from_image(png, 5, 3, "soft");
  ASSERT_EQ(a.status, 200) << a.body;
  EXPECT_EQ(h->generate_from_image(png, 5, 3, "soft").body, a.body);
  EXPECT_EQ(h->generate_from_image(png, 5, 3, "hard").status, 200);
  EXPECT_EQ(h->generate_from_image(png, 5, 3, "logits").status, 400);
  EXPECT_EQ(json::parse(h->generate_from_image({1, 2, 3}, 5, 3, "soft").body)["error"], "bad_image");
}

TEST(Handlers, MismatchedCheckpointsRefuseToStart) {
  auto names = testing::standard_names();
  std::swap(names[3], names[4]);
  try {
    Handlers h(testing::tiny_encoder(1, names), testing::tiny_gan(2), ServiceConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
  }
}

class ServerTest : public ::testing::Test {
 protected:
  void start(std::size_t max_upload = 8u << 20) {
    handlers_ = make_handlers(max_upload);
    server_ = std::make_unique<Server>(handlers_);
    port_ = server_->bind();
    thread_ = std::thread([this] { server_->run(); });
  }
  void TearDown() override {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

  std::shared_ptr<Handlers> handlers_;
  std::unique_ptr<Server> server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServerTest, RoutesAndErrors) {
  start();
  auto c = client();
  auto res = c.Get("/classes");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(json::parse(res->body)["classes"].size(), 9u);

  res = c.Post("/generate", label_body(one_hot(0), 3), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, handlers_->generate(label_body(one_hot(0), 3)).body);

  std::vector<double> over(9, 0.0);
  over[2] = 1.2;
  res = c.Post("/generate", label_body(over, 3), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["error"], "label_not_simplex");

  res = c.Get("/nope");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body)["error"], "not_found");
}

TEST_F(ServerTest, MultipartImageUpload) {
  start();
  const auto png = test_png();
  httplib::MultipartFormDataItems items{
      {"image", std::string(png.begin(), png.end()), "t.png", "image/png"},
      {"seed", "7", "", ""},
      {"iters", "3", "", ""}};
  auto c = client();
  auto res = c.Post("/generate-from-image", items);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(res->body, handlers_->generate_from_image(png, 7, 3, "soft").body);
}

TEST_F(ServerTest, OversizeUploadIs413) {
  start(4096);
  std::string big(20000, 'x');
  auto c = client();
  auto res = c.Post("/generate-from-image", big, "application/octet-stream");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 413);
}

TEST_F(ServerTest, ConcurrentRequestsMatchSerialResults) {
  start();
  std::vector<std::string> expect;
  for (int i = 0; i < 4; ++i) expect.push_back(handlers_->generate(label_body(one_hot(i), i)).body);
  std::vector<std::future<std::string>> futures;
  for (int i = 0; i < 4; ++i) {
    futures.push_back(std::async(std::launch::async, [this, i] {
      auto c = client();
      auto res = c.Post("/generate", label_body(one_hot(i), i), "application/json");
      return res ? res->body : std::string("no response");
    }));
  }
  for (int i = 0; i < 4; ++i) EXPECT_EQ(futures[i].get(), expect[i]) << i;
}

}  // namespace
}  // namespace texvib::service
