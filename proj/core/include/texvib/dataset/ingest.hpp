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

// On-disk layout:
//
//   root/manifest.json
//   root/<class dir>/images/<id>.png|.bmp
//   root/<class dir>/accel/<id>.f32 + <id>.f32.json   or   <id>.wav
//
// A .f32 file is raw little-endian IEEE-754 binary32 samples with no header.
// Its sidecar is a single-line JSON object {"sample_rate_hz": R, "length": N}.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "texvib/dataset/dataset.hpp"

namespace texvib::dataset {

inline constexpr const char* kManifestSchema = "texvib-manifest-v1";

struct ManifestClass {
  std::string name;
  std::string dir;
};

struct SplitAssignment {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::vector<std::string> test;  // "class_name/id"
};

struct DatasetManifest {
  std::vector<ManifestClass> classes;
  codec::CodecConfig codec;
  std::optional<codec::NormStats> norm_stats;
  std::optional<SplitAssignment> split;

  std::vector<std::string> class_names() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// Lowercase, runs of non-alphanumerics collapsed to '_'.
std::string class_dir_name(const std::string& class_name);

/// Reads every class listed in the manifest. Images and signals pair by file
/// stem; files are visited in sorted path order.
Dataset ingest(const std::filesystem::path& root, const DatasetManifest& manifest);

/// Reads root/manifest.json then ingests.
Dataset ingest(const std::filesystem::path& root);

/// Writes images as PNG and signals as .f32 with sidecars, then the manifest.
/// Returns the manifest that was written.
DatasetManifest write_dataset(const Dataset& data, const std::filesystem::path& root,
                              const std::optional<codec::NormStats>& stats = std::nullopt,
                              const std::optional<SplitAssignment>& split = std::nullopt);

void write_f32(const codec::Waveform& wave, const std::filesystem::path& path);
codec::Waveform read_f32(const std::filesystem::path& path);

}  // namespace texvib::dataset
