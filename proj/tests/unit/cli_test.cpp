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

#include "test_support.hpp"
#include "texvib/dataset/ingest.hpp"

namespace texvib {
namespace {

using testing::read_bytes;
using testing::run_command;
using testing::TempDir;

const std::string kCli = TEXVIB_CLI_PATH;

std::string last_line(const std::string& text) {
  auto end = text.find_last_not_of('\n');
  if (end == std::string::npos) return {};
  const auto begin = text.rfind('\n', end);
  return text.substr(begin == std::string::npos ? 0 : begin + 1, end - (begin == std::string::npos ? 0 : begin + 1) + 1);
}

TEST(Cli, GenerateRerunsAreByteIdentical) {
  TempDir dir;
  auto gan = testing::tiny_gan(3);
  gan::save_gan(gan, dir / "g.tnn");
  for (const char* prefix : {"a", "b"}) {
    const auto r = run_command(kCli + " generate --ckpt " + (dir / "g.tnn").string() +
                                   " --class Glass --seed 4 --iters 3 --out " + (dir / prefix).string(),
                               dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  EXPECT_EQ(read_bytes(dir / "a.wav"), read_bytes(dir / "b.wav"));
  EXPECT_EQ(read_bytes(dir / "a.spc1"), read_bytes(dir / "b.spc1"));
  EXPECT_FALSE(read_bytes(dir / "a.wav").empty());

  const auto inv = run_command(kCli + " invert --spec " + (dir / "a.spc1").string() + " --iters 3 --out " +
                                   (dir / "c.wav").string(),
                               dir.path());
  ASSERT_EQ(inv.exit_code, 0) << inv.err;
}

TEST(Cli, SynthDatasetIsReproducible) {
  TempDir dir;
  for (const char* out : {"d1", "d2"}) {
    const auto r = run_command(kCli + " synth-dataset --classes 2 --per-class 2 --length 17000 --seed 3 --out " +
                                   (dir / out).string(),
                               dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  EXPECT_EQ(read_bytes(dir / "d1" / "manifest.json"), read_bytes(dir / "d2" / "manifest.json"));
  const auto a = dataset::ingest(dir / "d1"), b = dataset::ingest(dir / "d2");
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.samples[i].wave.samples, b.samples[i].wave.samples);
}

TEST(Cli, UsageErrorsExitTwo) {
  TempDir dir;
  EXPECT_EQ(run_command(kCli + " generate", dir.path()).exit_code, 2);
  EXPECT_EQ(run_command(kCli + " no-such-command", dir.path()).exit_code, 2);
  EXPECT_EQ(run_command(kCli + " invert --spec x --out y --iters notanumber", dir.path()).exit_code, 2);
}

TEST(Cli, RuntimeErrorsPrintOneCategorizedLine) {
  TempDir dir;
  const auto r = run_command(kCli + " generate --ckpt " + (dir / "missing.tnn").string() + " --class Glass",
                             dir.path());
  EXPECT_EQ(r.exit_code, exit_code(ErrorCode::kIo));
  EXPECT_EQ(last_line(r.err).rfind("error: io: ", 0), 0u) << r.err;

  auto gan = testing::tiny_gan(3);
  gan::save_gan(gan, dir / "g.tnn");
  const auto bad = run_command(kCli + " generate --ckpt " + (dir / "g.tnn").string() +
                                   " --label 0.5,0.6,0,0,0,0,0,0,0 --out " + (dir / "x").string(),
                               dir.path());
  EXPECT_EQ(bad.exit_code, exit_code(ErrorCode::kInvalidArgument));
  EXPECT_EQ(last_line(bad.err).rfind("error: invalid_argument: ", 0), 0u) << bad.err;
}

TEST(Cli, GradcheckPasses) {
  TempDir dir;
  const auto r = run_command(kCli + " gradcheck --filter dense", dir.path());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

}  // namespace
}  // namespace texvib
