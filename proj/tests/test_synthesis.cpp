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
#include <set>

#include "doctest.h"

#include "deskscene/synthesis.hpp"
#include "support.hpp"

using namespace deskscene;
using namespace deskscene::testing;

namespace {

WindowAsset tiny_window(std::string id, int w, int h, Rect el, DomainCategory c = DomainCategory::Utilities) {
  return {std::move(id), "", c, "", "", w, h, {{"e", "open menu", el, std::nullopt}}};
}

}  // namespace

TEST_CASE("shipped levels") {
  const auto levels = default_levels();
  REQUIRE(levels.size() == 5);
  const std::vector<DifficultyLevel> expect{
      {"L1", {2, 4}, {1.00, 1.00}, 1}, {"L2", {4, 6}, {0.80, 0.90}, 2},
      {"L3", {6, 9}, {0.70, 0.80}, 3}, {"L4", {8, 12}, {0.50, 0.70}, 4},
      {"L5", {10, 15}, {0.30, 0.50}, 5}};
  CHECK(levels == expect);
  for (const auto& l : levels) CHECK(l.visible.lo >= 0.30);
}

TEST_CASE("shipped priors") {
  const PriorTable t = PriorTable::defaults();
  CHECK(t.regions.size() == 9);
  CHECK(t.prior(DomainCategory::Communication).region == NormalizedRegion{0.70, 0.95, 0.55, 0.85});
  CHECK(t.prior(DomainCategory::Browsers).region == NormalizedRegion{0.20, 0.55, 0.05, 0.30});
  CHECK(t.prior(DomainCategory::AdvancedTools).region == NormalizedRegion{0.05, 0.35, 0.55, 0.85});
}

TEST_CASE("get_params") {
  const SynthesisConfig cfg;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const auto p1 = get_params(cfg.level("L1"), rng);
    CHECK(p1.n_win >= 2);
    CHECK(p1.n_win <= 4);
    CHECK(p1.visible_goal == 1.0);
    CHECK(p1.l_sim == 1);
    const auto p5 = get_params(cfg.level("L5"), rng);
    CHECK(p5.n_win >= 10);
    CHECK(p5.n_win <= 15);
    CHECK(p5.visible_goal >= 0.30);
    CHECK(p5.visible_goal <= 0.50);
    CHECK(p5.l_sim == 5);
  }
  Rng a(9), b(9);
  CHECK(get_params(cfg.level("L3"), a) == get_params(cfg.level("L3"), b));
  CHECK_THROWS_AS((void)cfg.level("L9"), ConfigError);
}

TEST_CASE("apply_spatial_prior") {
  const PriorTable t = PriorTable::defaults();
  SUBCASE("communication window lands in its periphery") {
    for (std::uint64_t s = 0; s < 500; ++s) {
      Rng rng(s);
      const IPoint p = apply_spatial_prior(t, DomainCategory::Communication, 400, 300, rng);
      CHECK(p.x >= std::ceil(0.70 * 2560));
      CHECK(p.x <= 2560 - 400);  // region's right part is clamped off-canvas
      CHECK(p.y >= std::ceil(0.55 * 1440));
      CHECK(p.y <= 1440 - 300);
    }
  }
  SUBCASE("canvas-sized window is pinned to the origin") {
    Rng rng(1);
    CHECK(apply_spatial_prior(t, DomainCategory::Gaming, 2560, 1440, rng) == IPoint{0, 0});
  }
  SUBCASE("oversize window is unplaceable") {
    Rng rng(1);
    CHECK_THROWS_AS(apply_spatial_prior(t, DomainCategory::Gaming, 2561, 10, rng), UnplaceableWindow);
  }
  SUBCASE("uniform over the clamped region by decile") {
    // Browsers x: [0.20, 0.55] * 2560 = [512, 1408]; a 300 px window fits.
    const int lo = static_cast<int>(std::ceil(0.20 * 2560));
    const int hi = static_cast<int>(std::floor(0.55 * 2560));
    const int n = 10000;
    std::vector<int> counts(10, 0);
    Rng rng(77);
    for (int i = 0; i < n; ++i) {
      const IPoint p = apply_spatial_prior(t, DomainCategory::Browsers, 300, 200, rng);
      REQUIRE(p.x >= lo);
      REQUIRE(p.x <= hi);
      ++counts[std::min(9, (p.x - lo) * 10 / (hi - lo + 1))];
    }
    for (int d = 0; d < 10; ++d) {
      int cells = 0;
      for (int x = lo; x <= hi; ++x) cells += (x - lo) * 10 / (hi - lo + 1) == d;
      const double pr = static_cast<double>(cells) / (hi - lo + 1);
      const double sigma = std::sqrt(n * pr * (1 - pr));
      CAPTURE(d);
      CHECK(std::abs(counts[d] - n * pr) < 5 * sigma);
    }
  }
  SUBCASE("prior center") {
    CHECK(prior_center(t.prior(DomainCategory::Gaming).region, 2560, 1440) == IPoint{0, 0});
  }
}

TEST_CASE("config json round trip and validation") {
  SynthesisConfig cfg;
  cfg.delta = 0.03;
  cfg.occluders_above_count = 2;
  cfg.priors.regions[DomainCategory::Gaming] = {0.1, 0.2, 0.3, 0.4};
  const SynthesisConfig back = config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(config_digest(back) == config_digest(cfg));
  CHECK(config_digest(back) != config_digest(SynthesisConfig{}));

  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"deltta", 0.1}}), ConfigError);
  SynthesisConfig bad;
  bad.delta = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SynthesisConfig{};
  bad.cascade_probability = 0.7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sweep constraints") {
  const SynthesisConfig cfg;
  const auto occ = constraints_for_sweep("occlusion", 0.5, cfg, 6);
  CHECK(occ.n_win == IntRange{2, 2});
  CHECK(occ.accept.lo == doctest::Approx(0.48));
  CHECK(occ.accept.hi == doctest::Approx(0.52));
  CHECK(constraints_for_sweep("occlusion", 1.0, cfg, 6).accept == RealRange{1.0, 1.0});
  CHECK(constraints_for_sweep("occlusion", 0.3, cfg, 6).accept.lo == doctest::Approx(0.30));
  CHECK(constraints_for_sweep("clutter", 8, cfg, 6).n_win == IntRange{8, 8});
  const auto sim = constraints_for_sweep("similarity", 3, cfg, 6);
  CHECK(sim.l_sim == 3);
  CHECK(sim.n_win == IntRange{6, 6});
  CHECK(sim.goal == RealRange{1.0, 1.0});
  CHECK_THROWS_AS(constraints_for_sweep("clutter", 2.5, cfg, 6), ConfigError);
  CHECK_THROWS_AS(constraints_for_sweep("occlusion", 0.1, cfg, 6), ConfigError);
  CHECK_THROWS_AS(constraints_for_sweep("similarity", 6, cfg, 6), ConfigError);
  CHECK_THROWS_AS(constraints_for_sweep("lighting", 1, cfg, 6), ConfigError);
}

TEST_CASE("synthesized scenes satisfy their level") {
  const Repository& repo = fixture_repo();
  const SimilarityIndex index(repo, nullptr);
  const SynthesisConfig cfg;
  for (const auto& level : cfg.levels) {
    const SceneConstraints c = constraints_for_level(level, cfg);
    for (std::uint64_t s = 0; s < 30; ++s) {
      CAPTURE(level.name);
      CAPTURE(s);
      const SceneSpec spec = synthesize_scene(index, cfg, c, derive_seed(5, s));
      REQUIRE(level.n_win.contains(spec.n_win));
      REQUIRE(spec.distractors.size() == static_cast<std::size_t>(spec.n_win - 1));
      REQUIRE(level.visible.contains(spec.predicted_element_visibility));
      REQUIRE(spec.predicted_element_visibility >= 0.30);

      std::set<std::string> ids{spec.target_window_id};
      for (const auto& d : spec.distractors) REQUIRE(ids.insert(d.window_id).second);

      // Exactly the head of the similar-window sequence, recomputed.
      const auto& tw = repo.at(spec.target_window_id);
      const auto seq = index.build_sequence(tw, *tw.find_element(spec.target_element_id));
      std::vector<std::string> head;
      for (int i = 0; i < level.l_sim; ++i) head.push_back(seq.entries[i].window_id);
      REQUIRE(spec.similar_head == head);
      int semantic = 0;
      for (const auto& d : spec.distractors) {
        if (std::find(head.begin(), head.end(), d.window_id) != head.end()) {
          ++semantic;
          REQUIRE(d.semantic);
        } else {
          REQUIRE_FALSE(d.semantic);
        }
      }
      REQUIRE(semantic == level.l_sim);

      REQUIRE(spec.occluder_count() == (level.name == "L1" ? 0u : 1u));
      const SceneGeometry g = scene_geometry(spec, repo);
      REQUIRE(canvas_rect().contains(g.target_element));
      REQUIRE(intersect(canvas_rect(), g.target_window));
      for (const auto& r : g.occluders) REQUIRE(intersect(canvas_rect(), r));
      for (const auto& r : g.backgrounds) REQUIRE(intersect(canvas_rect(), r));
      REQUIRE(analytic_visible_ratio(g.target_element, g.occluders) ==
              spec.predicted_element_visibility);
    }
  }
}

TEST_CASE("synthesis is deterministic in the seed") {
  const SimilarityIndex index(fixture_repo(), nullptr);
  const SynthesisConfig cfg;
  const auto c = constraints_for_level(cfg.level("L4"), cfg);
  const SceneSpec a = synthesize_scene(index, cfg, c, 1234);
  const SceneSpec b = synthesize_scene(index, cfg, c, 1234);
  CHECK(a.distractors == b.distractors);
  CHECK(a.target_origin == b.target_origin);
  CHECK(a.predicted_element_visibility == b.predicted_element_visibility);
  const SceneSpec other = synthesize_scene(index, cfg, c, 1235);
  CHECK_FALSE((other.distractors == a.distractors && other.target_origin == a.target_origin));
}

TEST_CASE("two-window repository puts the sequence head as the only distractor") {
  Repository repo({tiny_window("a", 300, 200, {10, 40, 60, 20}),
                   tiny_window("b", 300, 200, {20, 40, 60, 20}, DomainCategory::Gaming)});
  const SimilarityIndex index(repo, nullptr);
  const SynthesisConfig cfg;
  SceneConstraints c = constraints_for_level(cfg.level("L1"), cfg);
  c.n_win = {2, 2};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SceneSpec spec = synthesize_scene(index, cfg, c, s);
    REQUIRE(spec.distractors.size() == 1);
    CHECK(spec.distractors[0].semantic);
    CHECK(spec.distractors[0].window_id != spec.target_window_id);
    CHECK(spec.distractors[0].role == ZRole::BackgroundBelow);
    CHECK(spec.predicted_element_visibility == 1.0);
  }
}

TEST_CASE("similarity and single-window scenes never occlude") {
  const SimilarityIndex index(fixture_repo(), nullptr);
  const SynthesisConfig cfg;
  for (int l = 1; l <= 5; ++l) {
    const auto c = constraints_for_sweep("similarity", l, cfg, 6);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const SceneSpec spec = synthesize_scene(index, cfg, c, derive_seed(3, s, l));
      CHECK(spec.occluder_count() == 0);
      CHECK(spec.similar_head.size() == static_cast<std::size_t>(l));
    }
  }
  const SceneSpec single = synthesize_scene(index, cfg, single_window_constraints(), 1);
  CHECK(single.distractors.empty());
  CHECK(single.layout == LayoutMode::Single);
  const auto& tw = fixture_repo().at(single.target_window_id);
  CHECK(single.target_origin == prior_center(cfg.priors.prior(tw.category).region, tw.width, tw.height));
}

TEST_CASE("impossible occlusion is infeasible, too few windows is an error") {
  // Distractors are 2x2 px: no single occluder can hide half of a 60x20 element.
  Repository repo({tiny_window("big", 300, 200, {10, 40, 60, 20}),
                   tiny_window("d0", 2, 2, {0, 0, 1, 1}), tiny_window("d1", 2, 2, {0, 0, 1, 1})});
  const SimilarityIndex index(repo, nullptr);
  SynthesisConfig cfg;
  cfg.max_scene_retries = 3;
  cfg.max_attempts = 20;
  const auto c = constraints_for_sweep("occlusion", 0.5, cfg, 2);
  CHECK_THROWS_AS(synthesize_scene(index, cfg, c, 1), InfeasibleScene);
  try {
    (void)synthesize_scene(index, cfg, c, 1);
  } catch (const InfeasibleScene& e) {
    CHECK(e.seed == 1);
  }
  CHECK_THROWS_AS(synthesize_scene(index, cfg, constraints_for_level(cfg.level("L5"), cfg), 1),
                  SynthesisError);
}
