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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "deskscene/geometry.hpp"
#include "deskscene/repository.hpp"
#include "deskscene/rng.hpp"
#include "deskscene/similarity.hpp"

namespace deskscene {

inline constexpr std::string_view kEngineVersion = "0.3.0";

struct IntRange {
  int lo = 0;
  int hi = 0;
  [[nodiscard]] bool contains(int v) const { return v >= lo && v <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
  /// Inclusive, with a tolerance far below one pixel of any element.
  [[nodiscard]] bool contains(double v, double eps = 1e-9) const {
    return v >= lo - eps && v <= hi + eps;
  }
  friend bool operator==(const RealRange&, const RealRange&) = default;
};

/// Normalized canvas region [x0, x1] x [y0, y1] for a window's top-left anchor.
struct NormalizedRegion {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
  friend bool operator==(const NormalizedRegion&, const NormalizedRegion&) = default;
};

struct SpatialPrior {
  DomainCategory category = DomainCategory::Productivity;
  NormalizedRegion region;
};

struct PriorTable {
  std::string version;
  std::map<DomainCategory, NormalizedRegion> regions;

  /// Shipped defaults. Communication's region is the measured one; the
  /// others are placeholders meant to be overridden from config.
  static PriorTable defaults();
  [[nodiscard]] SpatialPrior prior(DomainCategory c) const;
};

struct DifficultyLevel {
  std::string name;
  IntRange n_win;
  RealRange visible;
  int l_sim = 1;
  friend bool operator==(const DifficultyLevel&, const DifficultyLevel&) = default;
};

/// L1..L5 window-count, visible-ratio and similar-distractor bands.
std::vector<DifficultyLevel> default_levels();

inline constexpr std::string_view kSingleWindowLevel = "SingleWindow";

enum class LayoutMode { Cascade, Tiling, Single };
std::string_view to_string(LayoutMode m);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthesisConfig {
  std::vector<DifficultyLevel> levels = default_levels();
  PriorTable priors = PriorTable::defaults();
  double delta = 0.02;             // placement-search tolerance around the goal
  double visibility_floor = 0.30;  // no record may fall below this
  int max_attempts = 200;          // position samples per distractor
  int max_scene_retries = 50;      // whole-scene retries inside one seed
  int max_seed_resamples = 16;     // seeds tried per scene index by the pipeline
  double cascade_probability = 0.5;
  double tiling_probability = 0.5;
  int cascade_offset = 48;
  int tiling_columns = 4;
  int tiling_rows = 3;
  int occluders_above_count = 1;
  double ambiguity_threshold = 0.95;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  /// Throws ConfigError for unknown names.
  [[nodiscard]] const DifficultyLevel& level(std::string_view name) const;
};

nlohmann::json to_json(const SynthesisConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
SynthesisConfig config_from_json(const nlohmann::json& j);
SynthesisConfig load_config(const std::filesystem::path& path);
std::string config_digest(const SynthesisConfig& cfg);

/// The concrete knobs one scene is synthesized under. Levels, the single
/// window baseline and each sweep point all reduce to this.
struct SceneConstraints {
  std::string protocol = "levels";  // levels | clutter | occlusion | similarity
  std::string tag;                  // "L3", "SingleWindow", "occlusion=0.8", ...
  std::optional<std::string> level;
  std::optional<std::string> factor;
  std::optional<double> sweep_value;
  IntRange n_win{2, 2};
  RealRange goal{1.0, 1.0};    // the requested visibility is drawn from here
  RealRange accept{1.0, 1.0};  // post-render verification band
  int l_sim = 0;
  bool single_window = false;
};

SceneConstraints constraints_for_level(const DifficultyLevel& level, const SynthesisConfig& cfg);
SceneConstraints single_window_constraints();
/// factor is "clutter", "occlusion" or "similarity". `similarity_n_win` is
/// the fixed window count used across a similarity sweep.
SceneConstraints constraints_for_sweep(std::string_view factor, double value,
                                       const SynthesisConfig& cfg, int similarity_n_win);

struct SceneParams {
  int n_win = 1;
  double visible_goal = 1.0;
  int l_sim = 0;
  friend bool operator==(const SceneParams&, const SceneParams&) = default;
};

SceneParams get_params(const DifficultyLevel& level, Rng& rng);
SceneParams get_params(const SceneConstraints& c, Rng& rng);

class UnplaceableWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Anchor drawn uniformly from the prior region intersected with the set of
/// anchors that keep the window on-canvas. When the two are disjoint the
/// region collapses onto the nearest feasible edge.
IPoint apply_spatial_prior(const NormalizedRegion& region, int width, int height, Rng& rng);
IPoint apply_spatial_prior(const PriorTable& priors, DomainCategory category, int width,
                           int height, Rng& rng);
/// Midpoint of the same clamped region; used for the single-window baseline.
IPoint prior_center(const NormalizedRegion& region, int width, int height);

enum class ZRole { OccluderAbove, BackgroundBelow };
std::string_view to_string(ZRole r);

struct DistractorPlacement {
  std::string window_id;
  IPoint origin;
  ZRole role = ZRole::BackgroundBelow;
  bool semantic = false;  // drawn from the head of the similar-window sequence
  friend bool operator==(const DistractorPlacement&, const DistractorPlacement&) = default;
};

struct SceneSpec {
  std::string scene_id;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  SceneConstraints constraints;
  std::string target_window_id;
  std::string target_element_id;
  IPoint target_origin;
  std::vector<DistractorPlacement> distractors;  // paint order within each role
  int canvas_width = kCanvasWidth;
  int canvas_height = kCanvasHeight;
  int n_win = 1;
  int l_sim = 0;
  double requested_visible = 1.0;
  double predicted_element_visibility = 1.0;
  double predicted_window_visibility = 1.0;
  LayoutMode layout = LayoutMode::Single;
  std::string background_id;
  bool ambiguity_risk = false;
  std::vector<std::string> ambiguous_windows;
  std::string similarity_source;
  std::vector<std::string> similar_head;  // Q_sim head ids used as distractors
  std::string prior_table_version;
  int scene_retries = 0;     // whole-scene retries consumed within this seed
  int position_samples = 0;  // total placement samples drawn
  int seed_resamples = 0;    // seeds tried by the pipeline before this one

  [[nodiscard]] std::size_t occluder_count() const;
};

/// Placement failed within the attempt budget for this seed.
class InfeasibleScene : public std::runtime_error {
 public:
  InfeasibleScene(std::uint64_t seed, double best_visibility, const std::string& why);
  std::uint64_t seed;
  double best_visibility;
};

/// Unrecoverable setup problem (e.g. too few windows); never retried.
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Samples one scene. Deterministic in (repository, config, constraints,
/// seed). Throws InfeasibleScene when the budget runs out.
SceneSpec synthesize_scene(const SimilarityIndex& index, const SynthesisConfig& cfg,
                           const SceneConstraints& constraints, std::uint64_t seed);

/// Global rects of a spec's windows, resolved against the repository.
struct SceneGeometry {
  Rect target_window;
  Rect target_element;
  std::vector<Rect> occluders;    // occluder_above windows in paint order
  std::vector<Rect> backgrounds;  // background_below windows in paint order
};
SceneGeometry scene_geometry(const SceneSpec& spec, const Repository& repo);

}  // namespace deskscene
