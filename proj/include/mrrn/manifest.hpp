/* Copyright 2026 The MRRN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Dataset manifest: one JSON object per line,
//   {"video_id": "...", "label": 0, "num_frames": 30,
//    "paths": {"low": "...", "mid": "...", "high": "..."}}
// with feature paths relative to the manifest's directory, and a sibling
// classes.txt holding one class name per line (line i is label i).

#ifndef MRRN_MANIFEST_HPP_
#define MRRN_MANIFEST_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mrrn/features.hpp"

namespace mrrn {

struct ManifestEntry {
  std::string video_id;
  std::size_t label = 0;
  std::size_t num_frames = 0;
  std::map<Level, std::string> paths;
};

struct DatasetManifest {
  std::filesystem::path root;  // directory the relative paths resolve against
  std::vector<std::string> classes;
  std::vector<ManifestEntry> entries;

  std::size_t num_classes() const { return classes.size(); }
  std::filesystem::path FeaturePath(const ManifestEntry& entry,
                                    Level level) const;
  // Labels in [0, num_classes), unique video ids, num_frames >= 1.
  void Validate() const;
};

inline constexpr const char* kClassesFile = "classes.txt";

DatasetManifest LoadManifest(const std::filesystem::path& jsonl);
// Writes `jsonl` and classes.txt next to it.
void SaveManifest(const std::filesystem::path& jsonl,
                  const DatasetManifest& manifest);

std::vector<std::string> ReadClassNames(const std::filesystem::path& path);

// Throws IoError listing every entry whose feature file for `level` is
// absent, not just the first.
void RequireFeatureFiles(const DatasetManifest& manifest, Level level);

}  // namespace mrrn

#endif  // MRRN_MANIFEST_HPP_
