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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "deskscene/image.hpp"
#include "deskscene/renderer.hpp"
#include "deskscene/synthesis.hpp"

namespace deskscene {

/// One verified benchmark sample.
struct SceneRecord {
  SceneSpec spec;
  DomainCategory category = DomainCategory::Productivity;  // target window's
  std::string instruction;
  Rect gt_bbox_global;
  double measured_element_visibility = 1.0;
  double measured_window_visibility = 1.0;
  std::string image_path;  // relative to the annotations file

  [[nodiscard]] nlohmann::json to_json() const;
  static SceneRecord from_json(const nlohmann::json& j);
};

struct Rejection {
  std::string scene_id;
  double measured_element_visibility = 0.0;
  std::string reason;
};

using VerifyResult = std::variant<SceneRecord, Rejection>;

/// Accepts iff the pixel-measured element visibility lies inside the
/// scene's acceptance band and at or above the floor.
VerifyResult verify_scene(const SceneSpec& spec, const Repository& repo,
                          const CoverageMask& element_mask, const CoverageMask& window_mask,
                          const SynthesisConfig& cfg);

struct SceneRequest {
  std::string scene_id;
  SceneConstraints constraints;
};

struct GenerationOptions {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// When set, images are written to <out_dir>/images/<scene_id>.png.
  std::optional<std::filesystem::path> out_dir;
  const Image* background = nullptr;  // placeholder gradient when null
  std::string background_id;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct GenerationStats {
  std::size_t scenes = 0;
  std::size_t synth_calls = 0;
  std::size_t infeasible = 0;  // InfeasibleScene thrown by synthesize_scene
  std::size_t rejected = 0;    // synthesized but failed pixel verification
};

struct GenerationResult {
  std::vector<SceneRecord> records;  // in request order
  GenerationStats stats;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs every request on a worker pool. Scene i uses seeds
/// derive_seed(master, i, k) for k = 0, 1, ... until one verifies, so the
/// output depends only on (repository, config, requests, master seed).
GenerationResult generate_scenes(const SimilarityIndex& index, const SynthesisConfig& cfg,
                                 const std::vector<SceneRequest>& requests,
                                 const GenerationOptions& options);

/// Single-factor sweeps: factor is clutter, occlusion or similarity.
std::vector<SceneRequest> protocol_one_requests(const SynthesisConfig& cfg,
                                                std::string_view factor,
                                                const std::vector<double>& sweep,
                                                int scenes_per_point);
GenerationResult generate_protocol_one(const SimilarityIndex& index, const SynthesisConfig& cfg,
                                       std::string_view factor, const std::vector<double>& sweep,
                                       int scenes_per_point, const GenerationOptions& options);

/// Difficulty levels by name, plus "SingleWindow" for the baseline.
std::vector<SceneRequest> protocol_two_requests(const SynthesisConfig& cfg,
                                                const std::vector<std::string>& levels,
                                                int scenes_per_level);
GenerationResult generate_protocol_two(const SimilarityIndex& index, const SynthesisConfig& cfg,
                                       const std::vector<std::string>& levels,
                                       int scenes_per_level, const GenerationOptions& options);

std::vector<double> default_sweep(std::string_view factor);

/// One JSON object per line, in record order.
std::string annotations_jsonl(const std::vector<SceneRecord>& records);
void write_annotations(const std::filesystem::path& path, const std::vector<SceneRecord>& records);
std::vector<SceneRecord> read_annotations(const std::filesystem::path& path);

}  // namespace deskscene
