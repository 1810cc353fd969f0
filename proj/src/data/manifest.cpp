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

#include "mrrn/manifest.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "mrrn/error.hpp"
#include "mrrn/io.hpp"

namespace mrrn {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path DatasetManifest::FeaturePath(const ManifestEntry& entry,
                                      Level level) const {
  auto it = entry.paths.find(level);
  if (it == entry.paths.end()) {
    throw ValidationError("video '" + entry.video_id + "' has no " +
                          std::string(LevelName(level)) + " feature path");
  }
  return root / it->second;
}

void DatasetManifest::Validate() const {
  if (classes.empty()) throw ValidationError("manifest has no classes");
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (e.label >= classes.size()) {
      throw ValidationError("video '" + e.video_id + "': label " +
                            std::to_string(e.label) + " outside [0, " +
                            std::to_string(classes.size()) + ")");
    }
    if (e.num_frames == 0) {
      throw ValidationError("video '" + e.video_id + "': num_frames must be >= 1");
    }
    if (!ids.insert(e.video_id).second) {
      throw ValidationError("duplicate video id '" + e.video_id + "'");
    }
  }
}

std::vector<std::string> ReadClassNames(const fs::path& path) {
  std::istringstream in(ReadFileText(path));
  std::vector<std::string> names;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    names.push_back(line);
  }
  return names;
}

DatasetManifest LoadManifest(const fs::path& jsonl) {
  DatasetManifest m;
  m.root = jsonl.parent_path();
  m.classes = ReadClassNames(m.root / kClassesFile);
  const std::string text = ReadFileText(jsonl);
  std::size_t line_no = 0, offset = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(offset, end - offset);
    const std::size_t line_offset = offset;
    offset = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      ManifestEntry e;
      e.video_id = j.at("video_id").get<std::string>();
      const auto label = j.at("label").get<std::int64_t>();
      if (label < 0) throw ValidationError("negative label");
      e.label = static_cast<std::size_t>(label);
      const auto frames = j.at("num_frames").get<std::int64_t>();
      if (frames < 1) throw ValidationError("num_frames must be >= 1");
      e.num_frames = static_cast<std::size_t>(frames);
      for (const auto& [key, value] : j.at("paths").items()) {
        e.paths[ParseLevel(key)] = value.get<std::string>();
      }
      m.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw FormatError(jsonl.string(), line_offset, where + ": " + ex.what());
    } catch (const ValidationError& ex) {
      throw FormatError(jsonl.string(), line_offset, where + ": " + ex.what());
    }
  }
  m.Validate();
  return m;
}

void SaveManifest(const fs::path& jsonl, const DatasetManifest& manifest) {
  manifest.Validate();
  std::string out;
  for (const auto& e : manifest.entries) {
    json paths = json::object();
    for (const auto& [level, p] : e.paths) paths[std::string(LevelName(level))] = p;
    json j = {{"video_id", e.video_id},
              {"label", e.label},
              {"num_frames", e.num_frames},
              {"paths", paths}};
    out += j.dump() + "\n";
  }
  WriteFileAtomic(jsonl, out);
  std::string names;
  for (const auto& c : manifest.classes) names += c + "\n";
  WriteFileAtomic(jsonl.parent_path() / kClassesFile, names);
}

void RequireFeatureFiles(const DatasetManifest& manifest, Level level) {
  std::vector<std::string> missing;
  for (const auto& e : manifest.entries) {
    const fs::path p = manifest.FeaturePath(e, level);
    if (!fs::is_regular_file(p)) missing.push_back(p.string());
  }
  if (missing.empty()) return;
  std::string msg = std::to_string(missing.size()) + " missing " +
                    std::string(LevelName(level)) + " feature files:";
  for (const auto& p : missing) msg += "\n  " + p;
  throw IoError(msg);
}

}  // namespace mrrn
