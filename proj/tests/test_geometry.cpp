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

#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"

#include "deskscene/geometry.hpp"
#include "deskscene/rng.hpp"

using namespace deskscene;

namespace {

// Brute-force reference: count target pixels under any occluder.
double brute_visible(const Rect& t, const std::vector<Rect>& occ) {
  std::int64_t covered = 0;
  for (int y = t.y; y < t.bottom(); ++y) {
    for (int x = t.x; x < t.right(); ++x) {
      if (std::any_of(occ.begin(), occ.end(), [&](const Rect& o) { return o.contains(x, y); })) {
        ++covered;
      }
    }
  }
  return 1.0 - static_cast<double>(covered) / static_cast<double>(t.area());
}

Rect random_rect(Rng& rng, int span, int max_side) {
  return Rect{static_cast<int>(rng.uniform_int(-20, span)), static_cast<int>(rng.uniform_int(-20, span)),
              static_cast<int>(rng.uniform_int(1, max_side)),
              static_cast<int>(rng.uniform_int(1, max_side))};
}

}  // namespace

TEST_CASE("intersect") {
  CHECK_FALSE(intersect({0, 0, 10, 10}, {20, 20, 5, 5}));
  CHECK(*intersect({0, 0, 10, 10}, {0, 0, 10, 10}) == Rect{0, 0, 10, 10});
  const auto r = intersect({0, 0, 10, 10}, {5, 5, 10, 10});
  REQUIRE(r);
  CHECK(*r == Rect{5, 5, 5, 5});
  int members = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      members += Rect{0, 0, 10, 10}.contains(x, y) && Rect{5, 5, 10, 10}.contains(x, y);
    }
  }
  CHECK(members == r->area());
  CHECK_FALSE(intersect({0, 0, 10, 10}, {10, 0, 5, 5}));  // touching edges share no pixel
}

TEST_CASE("to_global and to_local") {
  CHECK(to_global({10, 20, 30, 40}, {100, 200}).rect == Rect{110, 220, 30, 40});
  CHECK(to_global({0, 0, 5, 5}, {0, 0}).rect == Rect{0, 0, 5, 5});
  CHECK_FALSE(to_global({0, 0, 50, 5}, {2530, 0}).on_canvas);
  CHECK(to_global({0, 0, 30, 5}, {2530, 0}).on_canvas);

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Rect r = random_rect(rng, 3000, 800);
    const IPoint o{static_cast<int>(rng.uniform_int(-3000, 3000)),
                   static_cast<int>(rng.uniform_int(-3000, 3000))};
    REQUIRE(to_local(to_global(r, o).rect, o) == r);
  }
}

TEST_CASE("half-open hit predicate") {
  const Rect r{10, 10, 20, 10};
  CHECK(contains(r, Point{20.0, 15.0}));
  CHECK(contains(r, Point{10.0, 10.0}));
  CHECK_FALSE(contains(r, Point{30.0, 10.0}));
  CHECK_FALSE(contains(r, Point{10.0, 20.0}));
  CHECK(contains(r, Point{29.999, 19.999}));
  CHECK_FALSE(contains(r, Point{-5.0, -5.0}));
}

TEST_CASE("analytic visible ratio examples") {
  const Rect t{0, 0, 10, 10};
  CHECK(analytic_visible_ratio(t, {}) == 1.0);
  const std::vector<Rect> full{{0, 0, 10, 10}};
  CHECK(analytic_visible_ratio(t, full) == 0.0);
  const std::vector<Rect> l{{0, 0, 5, 10}, {5, 0, 5, 5}};
  CHECK(analytic_visible_ratio(t, l) == 0.25);
  CHECK(brute_visible(t, l) == 0.25);
  CHECK_THROWS_AS(analytic_visible_ratio(Rect{0, 0, 0, 4}, full), std::invalid_argument);
}

TEST_CASE("pixel visible ratio examples") {
  CoverageMask m({0, 0, 4, 4});
  CHECK(pixel_visible_ratio(m) == 1.0);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) m.mark(x, y);
  }
  CHECK(m.covered_count() == 8);
  CHECK(pixel_visible_ratio(m) == 0.5);
  m.paint({-10, -10, 100, 100});
  CHECK(pixel_visible_ratio(m) == 0.0);
  CHECK_THROWS_AS(CoverageMask(Rect{0, 0, 3, 0}), std::invalid_argument);
}

TEST_CASE("analytic equals brute force and mask on random configurations") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const Rect t = random_rect(rng, 120, 60);
    std::vector<Rect> occ;
    const int n = static_cast<int>(rng.uniform_int(0, 6));
    for (int k = 0; k < n; ++k) occ.push_back(random_rect(rng, 140, 80));
    CoverageMask m(t);
    for (const auto& o : occ) m.paint(o);
    const double a = analytic_visible_ratio(t, occ);
    REQUIRE(a == brute_visible(t, occ));
    REQUIRE(a == pixel_visible_ratio(m));
  }
}

TEST_CASE("monotone under added occluders and permutation invariant") {
  Rng rng(5);
  std::mt19937 shuffler(9);
  for (int i = 0; i < 200; ++i) {
    const Rect t = random_rect(rng, 100, 80);
    std::vector<Rect> occ;
    double prev = 1.0;
    for (int k = 0; k < 6; ++k) {
      occ.push_back(random_rect(rng, 120, 70));
      const double v = analytic_visible_ratio(t, occ);
      REQUIRE(v <= prev);
      prev = v;
    }
    std::vector<Rect> perm = occ;
    std::shuffle(perm.begin(), perm.end(), shuffler);
    REQUIRE(analytic_visible_ratio(t, perm) == prev);
  }
}

TEST_CASE("covered area on large rects stays exact") {
  const Rect t{0, 0, 2560, 1440};
  const std::vector<Rect> occ{{0, 0, 1280, 1440}, {1000, 0, 560, 720}};
  CHECK(covered_area(t, occ) == 1280LL * 1440 + 280LL * 720);
}
