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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "deskscene/pipeline.hpp"

namespace deskscene {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 3> kJudgmentFields = {
    "bbox_accurate", "target_clickable", "multiple_valid_targets"};

struct WorksheetRow {
  std::string scene_id;
  std::string level;  // empty for sweep scenes
  std::string image;
  std::string instruction;
  Rect gt_bbox;
  bool ambiguity_risk = false;
  std::array<std::optional<bool>, 3> judgments;  // in kJudgmentFields order
};

struct Worksheet {
  std::vector<WorksheetRow> rows;
};

/// Draws n scenes without replacement. When records carry levels the draw is
/// stratified: each level gets its largest-remainder share of n.
Worksheet sample_for_validation(const std::vector<SceneRecord>& records, std::size_t n,
                                std::uint64_t seed);

/// Comma-separated with a header row; fields quoted when needed. Judgments
/// are written as 1/0 and left blank when unset.
std::string worksheet_csv(const Worksheet& w);
/// Accepts 1/0, true/false, yes/no, y/n (any case) and blanks.
Worksheet parse_worksheet(std::string_view csv);
Worksheet load_worksheet(const std::filesystem::path& path);

struct FleissResult {
  double kappa = 0.0;
  bool degenerate = false;  // every rating in one category; kappa set to 1.0
};

/// counts[i][j]: raters assigning item i to category j. Every row must sum
/// to the same rater count, which must be at least 2.
FleissResult fleiss_kappa(const std::vector<std::vector<int>>& counts);

struct LevelRates {
  std::size_t scenes = 0;
  std::array<double, 3> rates{};  // fraction of judgments that are true
};

struct ValidationReport {
  std::size_t annotators = 0;
  std::size_t scenes = 0;
  /// "Overall" first, then each level present.
  std::vector<std::pair<std::string, LevelRates>> levels;
  /// Omitted with a single annotator.
  std::array<std::optional<FleissResult>, 3> kappa;
  std::optional<FleissResult> pooled_kappa;  // all three fields as one item set

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string table() const;
};

/// Throws ValidationError when sheets cover different scene sets or a
/// judgment is missing.
ValidationReport aggregate_validation(const std::vector<Worksheet>& sheets);

}  // namespace deskscene
