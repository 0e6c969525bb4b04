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

#include <cmath>
#include <fstream>
#include <set>

#include "deskscene/digest.hpp"
#include "deskscene/synthesis.hpp"

namespace deskscene {
namespace {

using nlohmann::json;

json region_json(const NormalizedRegion& r) {
  return json{{"x", {r.x0, r.x1}}, {"y", {r.y0, r.y1}}};
}

NormalizedRegion region_from_json(const json& j) {
  const auto x = j.at("x").get<std::vector<double>>();
  const auto y = j.at("y").get<std::vector<double>>();
  if (x.size() != 2 || y.size() != 2) throw ConfigError("prior region needs x:[x0,x1], y:[y0,y1]");
  return NormalizedRegion{x[0], x[1], y[0], y[1]};
}

}  // namespace

PriorTable PriorTable::defaults() {
  PriorTable t;
  t.version = "default-priors-v1";
  t.regions = {
      {DomainCategory::Browsers, {0.20, 0.55, 0.05, 0.30}},
      {DomainCategory::Productivity, {0.15, 0.50, 0.10, 0.40}},
      {DomainCategory::Communication, {0.70, 0.95, 0.55, 0.85}},
      {DomainCategory::DeveloperTools, {0.05, 0.40, 0.05, 0.35}},
      {DomainCategory::MediaEnt, {0.45, 0.80, 0.30, 0.60}},
      {DomainCategory::Utilities, {0.55, 0.90, 0.05, 0.30}},
      {DomainCategory::FileSystem, {0.10, 0.45, 0.45, 0.75}},
      {DomainCategory::Gaming, {0.35, 0.70, 0.35, 0.70}},
      {DomainCategory::AdvancedTools, {0.05, 0.35, 0.55, 0.85}},
  };
  return t;
}

SpatialPrior PriorTable::prior(DomainCategory c) const {
  auto it = regions.find(c);
  if (it == regions.end()) {
    throw ConfigError("no spatial prior for category " + std::string(to_string(c)));
  }
  return SpatialPrior{c, it->second};
}

std::vector<DifficultyLevel> default_levels() {
  return {
      {"L1", {2, 4}, {1.00, 1.00}, 1},
      {"L2", {4, 6}, {0.80, 0.90}, 2},
      {"L3", {6, 9}, {0.70, 0.80}, 3},
      {"L4", {8, 12}, {0.50, 0.70}, 4},
      {"L5", {10, 15}, {0.30, 0.50}, 5},
  };
}

std::string_view to_string(LayoutMode m) {
  switch (m) {
    case LayoutMode::Cascade: return "cascade";
    case LayoutMode::Tiling: return "tiling";
    case LayoutMode::Single: return "single";
  }
  return "?";
}

void SynthesisConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("config '" + key + "': " + why);
  };
  if (!(delta >= 0.0 && delta < 1.0)) fail("delta", "must lie in [0, 1)");
  if (!(visibility_floor >= 0.0 && visibility_floor <= 1.0)) fail("visibility_floor", "must lie in [0, 1]");
  if (max_attempts < 1) fail("max_attempts", "must be positive");
  if (max_scene_retries < 1) fail("max_scene_retries", "must be positive");
  if (max_seed_resamples < 1) fail("max_seed_resamples", "must be positive");
  if (occluders_above_count < 0) fail("occluders_above_count", "must be non-negative");
  if (cascade_offset < 0) fail("cascade_offset", "must be non-negative");
  if (tiling_columns < 1 || tiling_rows < 1) fail("tiling_grid", "must be at least 1x1");
  if (cascade_probability < 0.0 || tiling_probability < 0.0 ||
      std::abs(cascade_probability + tiling_probability - 1.0) > 1e-9) {
    fail("layout_mode_probabilities", "cascade + tiling must sum to 1");
  }
  if (!(ambiguity_threshold >= -1.0 && ambiguity_threshold <= 1.0)) {
    fail("ambiguity_threshold", "must lie in [-1, 1]");
  }
  std::set<std::string> names;
  for (const auto& l : levels) {
    const std::string key = "levels." + l.name;
    if (!names.insert(l.name).second) fail(key, "duplicate level name");
    if (l.name == kSingleWindowLevel) fail(key, "name is reserved");
    if (l.n_win.lo < 2 || l.n_win.hi < l.n_win.lo) fail(key, "n_win must satisfy 2 <= lo <= hi");
    if (!(l.visible.lo <= l.visible.hi) || l.visible.hi > 1.0) fail(key, "visible range must satisfy lo <= hi <= 1");
    if (l.visible.lo < visibility_floor) fail(key, "visible range lies below the visibility floor");
    if (l.l_sim < 1) fail(key, "l_sim must be >= 1");
    if (l.l_sim > l.n_win.lo - 1) fail(key, "l_sim exceeds the smallest distractor count");
  }
  for (DomainCategory c : kAllCategories) {
    auto it = priors.regions.find(c);
    const std::string key = "priors." + std::string(to_string(c));
    if (it == priors.regions.end()) fail(key, "missing");
    const auto& r = it->second;
    if (!(0.0 <= r.x0 && r.x0 <= r.x1 && r.x1 <= 1.0 && 0.0 <= r.y0 && r.y0 <= r.y1 && r.y1 <= 1.0)) {
      fail(key, "region must be ordered and within [0, 1]");
    }
  }
}

const DifficultyLevel& SynthesisConfig::level(std::string_view name) const {
  for (const auto& l : levels) {
    if (l.name == name) return l;
  }
  throw ConfigError("unknown difficulty level '" + std::string(name) + "'");
}

json to_json(const SynthesisConfig& cfg) {
  json levels = json::array();
  for (const auto& l : cfg.levels) {
    levels.push_back({{"name", l.name},
                      {"n_win", {l.n_win.lo, l.n_win.hi}},
                      {"visible", {l.visible.lo, l.visible.hi}},
                      {"l_sim", l.l_sim}});
  }
  json regions = json::object();
  for (const auto& [c, r] : cfg.priors.regions) regions[std::string(to_string(c))] = region_json(r);
  return json{
      {"levels", std::move(levels)},
      {"priors", {{"version", cfg.priors.version}, {"regions", std::move(regions)}}},
      {"delta", cfg.delta},
      {"visibility_floor", cfg.visibility_floor},
      {"max_attempts", cfg.max_attempts},
      {"max_scene_retries", cfg.max_scene_retries},
      {"max_seed_resamples", cfg.max_seed_resamples},
      {"layout_mode_probabilities",
       {{"cascade", cfg.cascade_probability}, {"tiling", cfg.tiling_probability}}},
      {"cascade_offset", cfg.cascade_offset},
      {"tiling_grid", {cfg.tiling_columns, cfg.tiling_rows}},
      {"occluders_above_count", cfg.occluders_above_count},
      {"ambiguity_threshold", cfg.ambiguity_threshold},
  };
}

SynthesisConfig config_from_json(const json& j) {
  static const std::set<std::string> kKnown = {
      "levels", "priors", "delta", "visibility_floor", "max_attempts", "max_scene_retries",
      "max_seed_resamples", "layout_mode_probabilities", "cascade_offset", "tiling_grid",
      "occluders_above_count", "ambiguity_threshold"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!kKnown.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  SynthesisConfig cfg;
  try {
    if (j.contains("levels")) {
      cfg.levels.clear();
      for (const auto& jl : j["levels"]) {
        const auto n = jl.at("n_win").get<std::vector<int>>();
        const auto v = jl.at("visible").get<std::vector<double>>();
        if (n.size() != 2 || v.size() != 2) throw ConfigError("level ranges need two entries");
        cfg.levels.push_back({jl.at("name").get<std::string>(), {n[0], n[1]}, {v[0], v[1]},
                              jl.at("l_sim").get<int>()});
      }
    }
    if (j.contains("priors")) {
      const auto& jp = j["priors"];
      if (jp.contains("version")) cfg.priors.version = jp["version"].get<std::string>();
      if (jp.contains("regions")) {
        for (const auto& [name, jr] : jp["regions"].items()) {
          auto c = parse_category(name);
          if (!c) throw ConfigError("priors: unknown category '" + name + "'");
          cfg.priors.regions[*c] = region_from_json(jr);
        }
      }
    }
    cfg.delta = j.value("delta", cfg.delta);
    cfg.visibility_floor = j.value("visibility_floor", cfg.visibility_floor);
    cfg.max_attempts = j.value("max_attempts", cfg.max_attempts);
    cfg.max_scene_retries = j.value("max_scene_retries", cfg.max_scene_retries);
    cfg.max_seed_resamples = j.value("max_seed_resamples", cfg.max_seed_resamples);
    if (j.contains("layout_mode_probabilities")) {
      const auto& lm = j["layout_mode_probabilities"];
      cfg.cascade_probability = lm.value("cascade", cfg.cascade_probability);
      cfg.tiling_probability = lm.value("tiling", cfg.tiling_probability);
    }
    cfg.cascade_offset = j.value("cascade_offset", cfg.cascade_offset);
    if (j.contains("tiling_grid")) {
      const auto g = j["tiling_grid"].get<std::vector<int>>();
      if (g.size() != 2) throw ConfigError("tiling_grid needs [columns, rows]");
      cfg.tiling_columns = g[0];
      cfg.tiling_rows = g[1];
    }
    cfg.occluders_above_count = j.value("occluders_above_count", cfg.occluders_above_count);
    cfg.ambiguity_threshold = j.value("ambiguity_threshold", cfg.ambiguity_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SynthesisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_digest(const SynthesisConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

}  // namespace deskscene
