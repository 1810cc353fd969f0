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

#include "mrrn/report.hpp"

#include <fmt/format.h>

#include <sstream>

#include <json.hpp>

#include "mrrn/error.hpp"
#include "mrrn/io.hpp"

namespace mrrn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string MetricsJson(const EvalResult& r) {
  json per_class = json::array();
  for (std::size_t k = 0; k < r.classes.size(); ++k) {
    per_class.push_back({{"class", k},
                         {"name", r.classes[k]},
                         {"accuracy", r.per_class_accuracy[k]},
                         {"videos", r.per_class_videos[k]}});
  }
  json j = {{"level", r.level},
            {"accuracy", r.accuracy},
            {"loss", r.loss},
            {"num_videos", r.videos.size()},
            {"classes", r.classes},
            {"per_class", per_class},
            {"confusion", r.confusion}};
  return j.dump(2) + "\n";
}

std::string PerClassCsv(const EvalResult& r) {
  std::string out = "class,name,accuracy,videos\n";
  for (std::size_t k = 0; k < r.classes.size(); ++k) {
    out += fmt::format("{},{},{},{}\n", k, r.classes[k], r.per_class_accuracy[k],
                       r.per_class_videos[k]);
  }
  return out;
}

std::string ConfusionCsv(const EvalResult& r) {
  std::string out = "true_class,predicted_class,count\n";
  for (std::size_t t = 0; t < r.confusion.size(); ++t) {
    for (std::size_t p = 0; p < r.confusion[t].size(); ++p) {
      out += fmt::format("{},{},{}\n", t, p, r.confusion[t][p]);
    }
  }
  return out;
}

std::string PredictionsJsonl(const EvalResult& r) {
  std::string out;
  for (const auto& v : r.videos) {
    json j = {{"video_id", v.video_id},
              {"level", r.level},
              {"probs", v.prediction.probs},
              {"argmax", v.prediction.argmax()},
              {"label", v.label}};
    out += j.dump() + "\n";
  }
  return out;
}

void WriteEvaluation(const fs::path& dir, const EvalResult& r) {
  WriteFileAtomic(dir / "metrics.json", MetricsJson(r));
  WriteFileAtomic(dir / "per_class.csv", PerClassCsv(r));
  WriteFileAtomic(dir / "confusion.csv", ConfusionCsv(r));
  WriteFileAtomic(dir / "predictions.jsonl", PredictionsJsonl(r));
}

EvalResult ReadEvaluation(const fs::path& dir) {
  const fs::path metrics_path = dir / "metrics.json";
  const fs::path pred_path = dir / "predictions.jsonl";
  std::string level;
  std::vector<std::string> classes;
  try {
    const json m = json::parse(ReadFileText(metrics_path));
    level = m.at("level").get<std::string>();
    classes = m.at("classes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(metrics_path.string(), 0, e.what());
  }
  std::vector<VideoPrediction> videos;
  const std::string text = ReadFileText(pred_path);
  std::size_t offset = 0, line_no = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(offset, end - offset);
    const std::size_t line_offset = offset;
    offset = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      VideoPrediction v;
      v.video_id = j.at("video_id").get<std::string>();
      v.label = j.at("label").get<std::size_t>();
      v.prediction.probs = j.at("probs").get<std::vector<double>>();
      v.prediction.provenance = Provenance::kVideoLevel;
      videos.push_back(std::move(v));
    } catch (const json::exception& e) {
      throw FormatError(pred_path.string(), line_offset,
                        "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return Score(level, classes, std::move(videos));
}

}  // namespace mrrn
