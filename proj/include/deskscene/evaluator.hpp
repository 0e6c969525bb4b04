// Copyright 2026 The deskscene Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "deskscene/geometry.hpp"
#include "deskscene/pipeline.hpp"

namespace deskscene {

enum class CoordinateSpace { Pixel, NormalizedUnit };
std::string_view to_string(CoordinateSpace s);

struct PredictionRecord {
  std::string scene_id;
  Point point;  // global canvas pixels after header conversion
  std::string model_tag;
  std::optional<std::string> raw_output;
};

struct PredictionSet {
  std::string model_tag;
  CoordinateSpace coordinate_space = CoordinateSpace::Pixel;
  std::vector<PredictionRecord> records;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First line: {"model_tag": ..., "coordinate_space": "pixel"|"normalized_unit"}.
/// Then one {"scene_id", "point": [x, y], "raw_output"?} per line.
/// Normalized points are scaled by the canvas size on load.
PredictionSet parse_predictions(std::string_view text);
PredictionSet load_predictions(const std::filesystem::path& path);
std::string predictions_jsonl(const PredictionSet& set);

bool is_hit(const Point& p, const Rect& gt_bbox);

enum class ScoreMode { Strict, Lenient };
std::string_view to_string(ScoreMode m);
ScoreMode parse_score_mode(std::string_view s);

struct SliceScore {
  std::size_t hits = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

struct ScoreReport {
  std::string model_tag;
  ScoreMode mode = ScoreMode::Strict;
  std::size_t hits = 0;
  std::size_t total = 0;
  double overall_accuracy = 0.0;
  /// Keys: "level:L3", "category:Browsers", "factor:occlusion=0.8".
  std::map<std::string, SliceScore> slices;
  std::vector<std::string> unmatched;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string table() const;
};

/// Joins predictions to records on scene_id. Throws EvaluationError on a
/// duplicate prediction, an unknown scene_id or a non-finite point.
ScoreReport score(const std::vector<SceneRecord>& records, const PredictionSet& predictions,
                  ScoreMode mode = ScoreMode::Strict);

/// Point at the center of each gt bbox; always a hit.
PredictionSet center_oracle(const std::vector<SceneRecord>& records, std::string model_tag = "center-oracle");

}  // namespace deskscene
