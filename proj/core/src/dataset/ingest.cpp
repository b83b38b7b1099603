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

#include "texvib/dataset/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

#include "texvib/codec/wav.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"
#include "texvib/util/binary_io.hpp"

namespace texvib::dataset {

namespace fs = std::filesystem;

namespace {

fs::path f32_sidecar_path(const fs::path& f32) {
  fs::path p = f32;
  p += ".json";
  return p;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::set<std::string>& extensions) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && extensions.count(lower(entry.path().extension().string()))) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::string> DatasetManifest::class_names() const {
  std::vector<std::string> out;
  for (const auto& c : classes) out.push_back(c.name);
  return out;
}

void DatasetManifest::validate() const {
  codec.validate();
  if (classes.empty()) fail(ErrorCode::kFormat, "manifest lists no classes");
  std::set<std::string> names, dirs;
  for (const auto& c : classes) {
    if (c.name.empty() || c.dir.empty()) fail(ErrorCode::kFormat, "manifest class with empty name or dir");
    if (c.dir.find("..") != std::string::npos || fs::path(c.dir).is_absolute()) {
      fail(ErrorCode::kFormat, "manifest class '" + c.name + "': dir must be relative to the root");
    }
    if (!names.insert(c.name).second) fail(ErrorCode::kFormat, "duplicate class '" + c.name + "'");
    if (!dirs.insert(c.dir).second) fail(ErrorCode::kFormat, "duplicate class dir '" + c.dir + "'");
  }
  if (norm_stats) norm_stats->validate();
}

void to_json(nlohmann::json& j, const DatasetManifest& m) {
  auto cls = nlohmann::json::array();
  for (const auto& c : m.classes) cls.push_back({{"name", c.name}, {"dir", c.dir}});
  j = nlohmann::json{{"schema", kManifestSchema}, {"classes", cls}, {"codec", m.codec}};
  if (m.norm_stats) j["norm_stats"] = *m.norm_stats;
  if (m.split) {
    j["split"] = {{"seed", m.split->seed},
                  {"test_fraction", m.split->test_fraction},
                  {"test", m.split->test}};
  }
}

void from_json(const nlohmann::json& j, DatasetManifest& m) {
  const auto schema = j.value("schema", std::string());
  if (schema != kManifestSchema) {
    fail(ErrorCode::kFormat, "manifest schema '" + schema + "' is not " + kManifestSchema);
  }
  DatasetManifest out;
  for (const auto& c : j.at("classes")) {
    out.classes.push_back({c.at("name").get<std::string>(), c.at("dir").get<std::string>()});
  }
  if (j.contains("codec")) out.codec = j.at("codec").get<codec::CodecConfig>();
  if (j.contains("norm_stats")) out.norm_stats = j.at("norm_stats").get<codec::NormStats>();
  if (j.contains("split")) {
    const auto& s = j.at("split");
    SplitAssignment a;
    a.seed = s.value("seed", std::uint64_t{0});
    a.test_fraction = s.value("test_fraction", 0.2);
    a.test = s.at("test").get<std::vector<std::string>>();
    out.split = a;
  }
  out.validate();
  m = out;
}

DatasetManifest read_manifest(const fs::path& path) {
  const std::string text = util::read_text_file(path);
  try {
    return nlohmann::json::parse(text).get<DatasetManifest>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
  m.validate();
  util::write_text_file(path, nlohmann::json(m).dump(2) + "\n");
}

std::string class_dir_name(const std::string& class_name) {
  std::string out;
  bool gap = false;
  for (unsigned char ch : class_name) {
    if (std::isalnum(ch)) {
      if (gap && !out.empty()) out += '_';
      out += static_cast<char>(std::tolower(ch));
      gap = false;
    } else {
      gap = true;
    }
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "class name '" + class_name + "' has no usable characters");
  return out;
}

void write_f32(const codec::Waveform& wave, const fs::path& path) {
  wave.validate();
  std::vector<std::uint8_t> bytes;
  bytes.reserve(wave.samples.size() * 4);
  for (double v : wave.samples) util::put_f32(bytes, static_cast<float>(v));
  util::write_file(path, bytes);
  const nlohmann::json side{{"sample_rate_hz", wave.sample_rate_hz}, {"length", wave.samples.size()}};
  util::write_text_file(f32_sidecar_path(path), side.dump() + "\n");
}

codec::Waveform read_f32(const fs::path& path) {
  const auto side_path = f32_sidecar_path(path);
  if (!fs::exists(side_path)) {
    fail(ErrorCode::kIo, path.string() + ": missing sidecar " + side_path.string());
  }
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(util::read_text_file(side_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, side_path.string() + ": " + e.what());
  }
  if (!side.contains("sample_rate_hz") || !side.contains("length")) {
    fail(ErrorCode::kFormat, side_path.string() + ": needs sample_rate_hz and length");
  }
  const auto bytes = util::read_file(path);
  const auto length = side.at("length").get<std::size_t>();
  if (bytes.size() != length * 4) {
    fail(ErrorCode::kFormat, path.string() + ": " + std::to_string(bytes.size()) +
                                 " bytes, sidecar declares " + std::to_string(length) +
                                 " f32 samples");
  }
  codec::Waveform wave;
  wave.sample_rate_hz = side.at("sample_rate_hz").get<int>();
  if (wave.sample_rate_hz <= 0) fail(ErrorCode::kFormat, side_path.string() + ": non-positive sample rate");
  util::ByteReader in(bytes, path.string());
  wave.samples.resize(length);
  for (auto& v : wave.samples) v = in.f32();
  for (double v : wave.samples) {
    if (!std::isfinite(v)) fail(ErrorCode::kFormat, path.string() + ": non-finite sample");
  }
  return wave;
}

Dataset ingest(const fs::path& root, const DatasetManifest& manifest) {
  manifest.validate();
  Dataset data;
  data.codec = manifest.codec;
  data.class_names = manifest.class_names();
  for (std::size_t k = 0; k < manifest.classes.size(); ++k) {
    const auto& cls = manifest.classes[k];
    const fs::path dir = root / cls.dir;
    const std::string tag = "class '" + cls.name + "'";
    if (!fs::is_directory(dir)) fail(ErrorCode::kIo, tag + ": missing directory " + dir.string());
    const fs::path img_dir = dir / "images";
    const fs::path acc_dir = dir / "accel";
    if (!fs::is_directory(img_dir) || !fs::is_directory(acc_dir)) {
      fail(ErrorCode::kIo, tag + ": expected images/ and accel/ under " + dir.string());
    }
    const auto images = sorted_files(img_dir, {".png", ".bmp"});
    const auto signals = sorted_files(acc_dir, {".f32", ".wav"});
    if (images.empty() && signals.empty()) {
      fail(ErrorCode::kInvalidArgument, tag + ": directory " + dir.string() + " is empty");
    }
    std::map<std::string, fs::path> by_stem;
    for (const auto& p : signals) {
      if (!by_stem.emplace(p.stem().string(), p).second) {
        fail(ErrorCode::kFormat, tag + ": two signal files share stem '" + p.stem().string() + "'");
      }
    }
    if (images.size() != signals.size()) {
      fail(ErrorCode::kMismatch, tag + ": " + std::to_string(images.size()) + " images but " +
                                     std::to_string(signals.size()) + " signals");
    }
    for (const auto& img_path : images) {
      const auto stem = img_path.stem().string();
      const auto it = by_stem.find(stem);
      if (it == by_stem.end()) {
        fail(ErrorCode::kMismatch, tag + ": no signal file for image " + img_path.string());
      }
      const fs::path& sig_path = it->second;
      SamplePair s;
      s.class_index = static_cast<int>(k);
      s.class_name = cls.name;
      s.id = stem;
      s.image = std::make_shared<const encoder::TextureImage>(encoder::read_image(img_path));
      s.wave = lower(sig_path.extension().string()) == ".wav" ? codec::read_wav(sig_path)
                                                              : read_f32(sig_path);
      if (s.wave.sample_rate_hz != manifest.codec.sample_rate_hz) {
        fail(ErrorCode::kMismatch, sig_path.string() + ": sample rate " +
                                       std::to_string(s.wave.sample_rate_hz) +
                                       " Hz does not match the manifest rate " +
                                       std::to_string(manifest.codec.sample_rate_hz) + " Hz");
      }
      data.samples.push_back(std::move(s));
    }
  }
  data.validate();
  return data;
}

Dataset ingest(const fs::path& root) { return ingest(root, read_manifest(root / "manifest.json")); }

DatasetManifest write_dataset(const Dataset& data, const fs::path& root,
                              const std::optional<codec::NormStats>& stats,
                              const std::optional<SplitAssignment>& split) {
  data.validate();
  DatasetManifest m;
  m.codec = data.codec;
  m.norm_stats = stats;
  m.split = split;
  for (const auto& name : data.class_names) m.classes.push_back({name, class_dir_name(name)});
  m.validate();
  for (const auto& c : m.classes) {
    fs::create_directories(root / c.dir / "images");
    fs::create_directories(root / c.dir / "accel");
  }
  for (const auto& s : data.samples) {
    const fs::path dir = root / m.classes[s.class_index].dir;
    encoder::write_png(*s.image, dir / "images" / (s.id + ".png"));
    write_f32(s.wave, dir / "accel" / (s.id + ".f32"));
  }
  write_manifest(m, root / "manifest.json");
  return m;
}

}  // namespace texvib::dataset
