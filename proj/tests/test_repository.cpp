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
#include <map>

#include "doctest.h"

#include "deskscene/repository.hpp"
#include "deskscene/rng.hpp"
#include "support.hpp"
#include "violations.hpp"

using namespace deskscene;
using namespace deskscene::testing;

TEST_CASE("minimal manifest loads") {
  TempDir dir;
  write_blank_png(dir / "w0.png", 200, 100);
  write_file(dir / "manifest.json", one_window_manifest().dump());
  const Repository repo = load_repository(dir / "manifest.json");
  CHECK(repo.size() == 1);
  const auto stats = repo.stats();
  REQUIRE(stats.size() == 1);
  CHECK(stats.at(DomainCategory::Communication).assets == 1);
  CHECK(stats.at(DomainCategory::Communication).elements == 2);
  CHECK(validate_repository(repo).empty());
  CHECK(repo.digest().size() == 64);
}

TEST_CASE("each violation is rejected with its finding") {
  for (const auto& v : repository_violations()) {
    CAPTURE(v.name);
    TempDir dir;
    CHECK(rejected_with(v, write_violation(v, dir.path())));
  }
}

TEST_CASE("bad bbox finding names the element") {
  TempDir dir;
  const auto v = repository_violations()[0];
  try {
    (void)load_repository(write_violation(v, dir.path()));
    FAIL("expected rejection");
  } catch (const RepositoryError& e) {
    CHECK(std::string(e.what()).find("inbox") != std::string::npos);
    CHECK(e.findings().front().field == "assets[0].elements[1].bbox");
  }
}

TEST_CASE("dimension mismatch is an error") {
  TempDir dir;
  write_blank_png(dir / "w0.png", 201, 100);
  write_file(dir / "manifest.json", one_window_manifest().dump());
  CHECK_THROWS_AS(load_repository(dir / "manifest.json"), RepositoryError);
}

TEST_CASE("duplicate instruction is a warning only") {
  TempDir dir;
  write_blank_png(dir / "w0.png", 200, 100);
  auto m = one_window_manifest();
  m["assets"][0]["elements"][1]["instruction"] = "send button";
  write_file(dir / "manifest.json", m.dump());
  const Repository repo = load_repository(dir / "manifest.json");
  const auto findings = validate_repository(repo);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].severity == Severity::Warning);
  CHECK(findings[0].code == FindingCode::DuplicateInstruction);
}

TEST_CASE("category names normalize") {
  CHECK(parse_category("mediaent") == DomainCategory::MediaEnt);
  CHECK(parse_category("Media & Ent") == DomainCategory::MediaEnt);
  CHECK(parse_category("developer-tools") == DomainCategory::DeveloperTools);
  CHECK_FALSE(parse_category("Spreadsheets"));
  for (auto c : kAllCategories) CHECK(parse_category(to_string(c)) == c);
}

TEST_CASE("fixture with one window per category indexes nine keys") {
  TempDir dir;
  FixtureOptions opts;
  opts.windows_per_category = 1;
  const Repository repo = load_repository(write_fixture_repository(dir.path(), opts));
  CHECK(repo.by_category().size() == 9);
  for (const auto& [cat, ids] : repo.by_category()) CHECK(ids.size() == 1);
  CHECK(validate_repository(repo).empty());
}

TEST_CASE("load, save, load is identity") {
  const Repository& a = fixture_repo();
  TempDir dir;
  std::filesystem::copy(fixture_manifest().parent_path() / "windows", dir / "windows");
  save_repository(a, dir / "manifest.json");
  const Repository b = load_repository(dir / "manifest.json");
  CHECK(a.assets() == b.assets());
}

TEST_CASE("sample_target") {
  SUBCASE("single pair") {
    Repository repo({WindowAsset{"w", "", DomainCategory::Gaming, "", "", 10, 10,
                                 {{"e", "play", {0, 0, 2, 2}, std::nullopt}}}});
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng rng(s);
      const auto p = sample_target(repo, rng);
      CHECK(p.window->id == "w");
      CHECK(p.element->id == "e");
    }
  }
  SUBCASE("deterministic and seed sensitive") {
    const Repository& repo = fixture_repo();
    Rng a(7), b(7), c(8);
    int differ = 0;
    for (int i = 0; i < 100; ++i) {
      const auto pa = sample_target(repo, a);
      const auto pb = sample_target(repo, b);
      const auto pc = sample_target(repo, c);
      REQUIRE(pa.element == pb.element);
      differ += pa.element != pc.element;
    }
    CHECK(differ > 0);
  }
  SUBCASE("uniform over pairs") {
    // Two windows holding 1 and 4 elements: pair-uniform gives 2000 each.
    auto el = [](const char* id) { return ElementAnnotation{id, id, {0, 0, 2, 2}, std::nullopt}; };
    Repository repo({WindowAsset{"a", "", DomainCategory::Gaming, "", "", 10, 10, {el("a0")}},
                     WindowAsset{"b", "", DomainCategory::Utilities, "", "", 10, 10,
                                 {el("b0"), el("b1"), el("b2"), el("b3")}}});
    std::map<std::string, int> freq;
    Rng rng(2024);
    for (int i = 0; i < 10000; ++i) {
      const auto p = sample_target(repo, rng);
      ++freq[p.window->id + "/" + p.element->id];
    }
    const double sigma = std::sqrt(10000 * 0.2 * 0.8);
    REQUIRE(freq.size() == 5);
    for (const auto& [k, n] : freq) {
      CAPTURE(k);
      CHECK(std::abs(n - 2000) < 5 * sigma);
    }
    Rng r2(1);
    CHECK(sample_target(repo, r2, DomainCategory::Gaming).window->id == "a");
    CHECK_THROWS_AS(sample_target(repo, r2, DomainCategory::Browsers), std::invalid_argument);
  }
}
