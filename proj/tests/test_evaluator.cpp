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

#include "doctest.h"

#include "deskscene/evaluator.hpp"
#include "score_fixture.hpp"
#include "support.hpp"

using namespace deskscene;
using namespace deskscene::testing;

namespace {

// Independent per-scene loop over the same join.
double brute_accuracy(const std::vector<SceneRecord>& recs, const PredictionSet& p) {
  int hits = 0;
  for (const auto& r : recs) {
    for (const auto& q : p.records) {
      if (q.scene_id != r.spec.scene_id) continue;
      const Rect& b = r.gt_bbox_global;
      hits += q.point.x >= b.x && q.point.x < b.x + b.w && q.point.y >= b.y && q.point.y < b.y + b.h;
    }
  }
  return recs.empty() ? 0.0 : static_cast<double>(hits) / recs.size();
}

std::vector<SceneRecord> generated_records() {
  static const std::vector<SceneRecord> recs = [] {
    const SimilarityIndex index(fixture_repo(), nullptr);
    GenerationOptions opts;
    opts.seed = 21;
    return generate_protocol_two(index, SynthesisConfig{}, {"L1", "L2", "L3", "L4", "L5"}, 6, opts)
        .records;
  }();
  return recs;
}

}  // namespace

TEST_CASE("is_hit") {
  const Rect b{10, 20, 30, 40};
  CHECK(is_hit({25.0, 40.0}, b));
  CHECK_FALSE(is_hit({40.0, 20.0}, b));
  CHECK_FALSE(is_hit({10.0, 60.0}, b));
  CHECK_FALSE(is_hit({-3.0, -7.0}, b));
}

TEST_CASE("hand-built four scenes score 0.75") {
  const auto recs = four_scene_records();
  const auto preds = four_scene_predictions();
  const ScoreReport r = score(recs, preds);
  CHECK(r.hits == 3);
  CHECK(r.total == 4);
  CHECK(r.overall_accuracy == 0.75);
  CHECK(r.overall_accuracy == brute_accuracy(recs, preds));
  CHECK(r.mode == ScoreMode::Strict);
  CHECK(r.slices.at("level:L1").accuracy == 1.0);
  CHECK(r.slices.at("level:L2").hits == 1);
  CHECK(r.slices.at("category:Browsers").total == 2);
  CHECK(r.slices.at("category:Utilities").accuracy == 0.0);
  CHECK(r.unmatched.empty());
}

TEST_CASE("missing predictions in strict and lenient modes") {
  const auto recs = four_scene_records();
  auto preds = four_scene_predictions();
  preds.records.erase(preds.records.begin());  // drop a hit
  const ScoreReport strict = score(recs, preds, ScoreMode::Strict);
  CHECK(strict.overall_accuracy == 0.5);
  CHECK(strict.unmatched == std::vector<std::string>{"a"});
  const ScoreReport lenient = score(recs, preds, ScoreMode::Lenient);
  CHECK(lenient.total == 3);
  CHECK(lenient.overall_accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(lenient.to_json()["mode"] == "lenient");

  const ScoreReport empty = score(recs, PredictionSet{});
  CHECK(empty.overall_accuracy == 0.0);
  CHECK(empty.unmatched.size() == 4);
}

TEST_CASE("bad prediction sets are errors") {
  const auto recs = four_scene_records();
  auto dup = four_scene_predictions();
  dup.records.push_back(dup.records[1]);
  try {
    (void)score(recs, dup);
    FAIL("duplicate accepted");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
  auto unknown = four_scene_predictions();
  unknown.records[0].scene_id = "zz";
  CHECK_THROWS_AS(score(recs, unknown), EvaluationError);
  auto nan = four_scene_predictions();
  nan.records[0].point.x = NAN;
  CHECK_THROWS_AS(score(recs, nan), EvaluationError);
}

TEST_CASE("prediction file header controls the coordinate space") {
  const auto px = parse_predictions(
      "{\"model_tag\":\"m\",\"coordinate_space\":\"pixel\"}\n{\"scene_id\":\"a\",\"point\":[0.5,0.5]}\n");
  CHECK(px.records[0].point.x == 0.5);
  const auto unit = parse_predictions(
      "{\"model_tag\":\"m\",\"coordinate_space\":\"normalized_unit\"}\n"
      "{\"scene_id\":\"a\",\"point\":[0.5,0.25],\"raw_output\":\"(0.5, 0.25)\"}\n");
  CHECK(unit.coordinate_space == CoordinateSpace::NormalizedUnit);
  CHECK(unit.records[0].point.x == 1280.0);
  CHECK(unit.records[0].point.y == 360.0);
  CHECK(unit.records[0].raw_output == "(0.5, 0.25)");
  CHECK(parse_predictions(predictions_jsonl(unit)).records[0].point.x == 1280.0);
  CHECK_THROWS_AS(parse_predictions("{\"scene_id\":\"a\",\"point\":[1,2]}\n"), EvaluationError);
  CHECK_THROWS_AS(parse_predictions("{\"model_tag\":\"m\",\"coordinate_space\":\"percent\"}\n"),
                  EvaluationError);
  CHECK(parse_predictions("").records.empty());
}

TEST_CASE("center oracle and slices over generated scenes") {
  const auto recs = generated_records();
  const ScoreReport r = score(recs, center_oracle(recs));
  CHECK(r.overall_accuracy == 1.0);
  std::size_t level_total = 0;
  for (const auto& [k, s] : r.slices) {
    if (k.rfind("level:", 0) == 0) level_total += s.total;
  }
  CHECK(level_total == r.total);

  PredictionSet corner;
  for (const auto& rec : recs) {
    const Rect& b = rec.gt_bbox_global;
    corner.records.push_back({rec.spec.scene_id, {double(b.right()), double(b.bottom())}, "c", std::nullopt});
  }
  CHECK(score(recs, corner).overall_accuracy == 0.0);
  CHECK(score(recs, corner).overall_accuracy == brute_accuracy(recs, corner));
}
