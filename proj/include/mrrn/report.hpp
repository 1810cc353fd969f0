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

// Evaluation artifacts. An evaluation directory holds
//   metrics.json      overall and per-class accuracy, confusion counts
//   per_class.csv     class,name,accuracy,videos
//   confusion.csv     true_class,predicted_class,count
//   predictions.jsonl {video_id, level, probs, argmax, label} per video

#ifndef MRRN_REPORT_HPP_
#define MRRN_REPORT_HPP_

#include <filesystem>
#include <string>

#include "mrrn/trainer.hpp"

namespace mrrn {

std::string MetricsJson(const EvalResult& result);
std::string PerClassCsv(const EvalResult& result);
std::string ConfusionCsv(const EvalResult& result);
std::string PredictionsJsonl(const EvalResult& result);

void WriteEvaluation(const std::filesystem::path& dir, const EvalResult& result);
// Rebuilds an EvalResult from WriteEvaluation's output.
EvalResult ReadEvaluation(const std::filesystem::path& dir);

}  // namespace mrrn

#endif  // MRRN_REPORT_HPP_
