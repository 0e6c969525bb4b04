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

#include "deskscene/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "deskscene/text.hpp"

namespace deskscene {

using nlohmann::json;

std::string_view to_string(CoordinateSpace s) {
  return s == CoordinateSpace::Pixel ? "pixel" : "normalized_unit";
}

std::string_view to_string(ScoreMode m) { return m == ScoreMode::Strict ? "strict" : "lenient"; }

ScoreMode parse_score_mode(std::string_view s) {
  if (s == "strict") return ScoreMode::Strict;
  if (s == "lenient") return ScoreMode::Lenient;
  throw EvaluationError("unknown scoring mode '" + std::string(s) + "'");
}

PredictionSet parse_predictions(std::string_view text) {
  PredictionSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw EvaluationError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (!j.is_object() || !j.contains("coordinate_space") || !j.contains("model_tag")) {
        throw EvaluationError("predictions must start with a {model_tag, coordinate_space} header");
      }
      set.model_tag = j["model_tag"].get<std::string>();
      const auto space = j["coordinate_space"].get<std::string>();
      if (space == "pixel") {
        set.coordinate_space = CoordinateSpace::Pixel;
      } else if (space == "normalized_unit") {
        set.coordinate_space = CoordinateSpace::NormalizedUnit;
      } else {
        throw EvaluationError("unknown coordinate_space '" + space + "'");
      }
      have_header = true;
      continue;
    }
    try {
      PredictionRecord r;
      r.scene_id = j.at("scene_id").get<std::string>();
      const json& p = j.at("point");
      if (!p.is_array() || p.size() != 2) throw EvaluationError("point must be [x, y]");
      r.point = {p[0].get<double>(), p[1].get<double>()};
      if (set.coordinate_space == CoordinateSpace::NormalizedUnit) {
        r.point.x *= kCanvasWidth;
        r.point.y *= kCanvasHeight;
      }
      r.model_tag = j.value("model_tag", set.model_tag);
      if (j.contains("raw_output") && j["raw_output"].is_string()) {
        r.raw_output = j["raw_output"].get<std::string>();
      }
      set.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw EvaluationError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  // An empty file is an empty pixel-space set.
  return set;
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw EvaluationError("cannot open predictions '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_predictions(ss.str());
}

std::string predictions_jsonl(const PredictionSet& set) {
  std::string out = json{{"model_tag", set.model_tag},
                         {"coordinate_space", std::string(to_string(set.coordinate_space))}}
                        .dump();
  out += '\n';
  const bool unit = set.coordinate_space == CoordinateSpace::NormalizedUnit;
  for (const auto& r : set.records) {
    json j{{"scene_id", r.scene_id},
           {"point",
            {unit ? r.point.x / kCanvasWidth : r.point.x, unit ? r.point.y / kCanvasHeight : r.point.y}}};
    if (r.raw_output) j["raw_output"] = *r.raw_output;
    out += j.dump();
    out += '\n';
  }
  return out;
}

bool is_hit(const Point& p, const Rect& gt_bbox) { return contains(gt_bbox, p); }

namespace {

void bump(std::map<std::string, SliceScore>& slices, const std::string& key, bool hit) {
  SliceScore& s = slices[key];
  ++s.total;
  if (hit) ++s.hits;
}

double ratio(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

ScoreReport score(const std::vector<SceneRecord>& records, const PredictionSet& predictions,
                  ScoreMode mode) {
  std::map<std::string, const SceneRecord*> by_id;
  for (const auto& r : records) {
    if (!by_id.emplace(r.spec.scene_id, &r).second) {
      throw EvaluationError("annotations contain scene_id '" + r.spec.scene_id + "' twice");
    }
  }
  std::map<std::string, Point> points;
  for (const auto& p : predictions.records) {
    if (!std::isfinite(p.point.x) || !std::isfinite(p.point.y)) {
      throw EvaluationError("non-finite prediction for scene '" + p.scene_id + "'");
    }
    if (!by_id.contains(p.scene_id)) {
      throw EvaluationError("prediction for unknown scene '" + p.scene_id + "'");
    }
    if (!points.emplace(p.scene_id, p.point).second) {
      throw EvaluationError("duplicate prediction for scene '" + p.scene_id + "'");
    }
  }

  ScoreReport report;
  report.model_tag = predictions.model_tag;
  report.mode = mode;
  for (const auto& r : records) {
    auto it = points.find(r.spec.scene_id);
    if (it == points.end()) {
      report.unmatched.push_back(r.spec.scene_id);
      if (mode == ScoreMode::Lenient) continue;
    }
    const bool hit = it != points.end() && is_hit(it->second, r.gt_bbox_global);
    ++report.total;
    if (hit) ++report.hits;
    const SceneConstraints& c = r.spec.constraints;
    if (c.level) bump(report.slices, "level:" + *c.level, hit);
    bump(report.slices, "category:" + std::string(to_string(r.category)), hit);
    if (c.factor) bump(report.slices, "factor:" + c.tag, hit);
  }
  report.overall_accuracy = ratio(report.hits, report.total);
  for (auto& [key, s] : report.slices) s.accuracy = ratio(s.hits, s.total);
  return report;
}

json ScoreReport::to_json() const {
  json sl = json::object();
  for (const auto& [key, s] : slices) {
    sl[key] = {{"hits", s.hits}, {"total", s.total}, {"accuracy", s.accuracy}};
  }
  return json{{"model_tag", model_tag},
              {"mode", std::string(to_string(mode))},
              {"hits", hits},
              {"total", total},
              {"overall_accuracy", overall_accuracy},
              {"slices", std::move(sl)},
              {"unmatched", unmatched}};
}

std::string ScoreReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "model %s  mode %s  unmatched %zu\n", model_tag.c_str(),
                std::string(deskscene::to_string(mode)).c_str(), unmatched.size());
  os << buf;
  std::snprintf(buf, sizeof buf, "%-32s %8s %8s %9s\n", "slice", "hits", "total", "accuracy");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-32s %8zu %8zu %8.2f%%\n", "overall", hits, total,
                100.0 * overall_accuracy);
  os << buf;
  for (const auto& [key, s] : slices) {
    std::snprintf(buf, sizeof buf, "%-32s %8zu %8zu %8.2f%%\n", key.c_str(), s.hits, s.total,
                  100.0 * s.accuracy);
    os << buf;
  }
  return os.str();
}

PredictionSet center_oracle(const std::vector<SceneRecord>& records, std::string model_tag) {
  PredictionSet set;
  set.model_tag = std::move(model_tag);
  for (const auto& r : records) {
    const Rect& b = r.gt_bbox_global;
    set.records.push_back({r.spec.scene_id, Point{b.x + b.w / 2.0, b.y + b.h / 2.0},
                           set.model_tag, std::nullopt});
  }
  return set;
}

}  // namespace deskscene
