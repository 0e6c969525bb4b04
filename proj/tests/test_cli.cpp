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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cli_runner.hpp"
#include "deskscene/digest.hpp"
#include "deskscene/evaluator.hpp"
#include "deskscene/validation.hpp"
#include "support.hpp"

using namespace deskscene;
using namespace deskscene::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("end-to-end through the command line") {
  TempDir dir;
  const std::string repo_dir = (dir / "repo").string();

  auto r = run_cli("make-fixture --out " + quote(repo_dir) + " --embedding-dim 32");
  REQUIRE(r.exit_code == 0);
  const std::string manifest = (fs::path(repo_dir) / "manifest.json").string();
  CHECK(r.out.find("manifest.json") != std::string::npos);
  CHECK(fs::exists(fs::path(repo_dir) / "embeddings.jsonl"));

  r = run_cli("stats --json --repo " + quote(manifest));
  REQUIRE(r.exit_code == 0);
  const auto st = nlohmann::json::parse(r.out);
  CHECK(st["assets"] == 18);
  CHECK(st["categories"]["Gaming"]["assets"] == 2);

  const std::string run = (dir / "run").string();
  r = run_cli("generate --repo " + quote(manifest) + " --protocol levels --levels L1,L4 --per-point 5 --seed 7 --out " +
              quote(run) + " --embeddings " + quote(repo_dir + "/embeddings.jsonl"));
  REQUIRE(r.exit_code == 0);
  const auto records = read_annotations(fs::path(run) / "annotations.jsonl");
  REQUIRE(records.size() == 10);
  for (const auto& rec : records) CHECK(fs::exists(fs::path(run) / rec.image_path));
  const auto run_manifest = nlohmann::json::parse(slurp(fs::path(run) / "run_manifest.json"));
  CHECK(run_manifest["scenes"] == 10);
  CHECK(run_manifest["annotations_sha256"] == sha256_hex(slurp(fs::path(run) / "annotations.jsonl")));
  CHECK(run_manifest["embeddings"]["model_tag"] == "hashed-bow-32");
  CHECK(fs::exists(fs::path(run) / "effective_config.json"));
  CHECK_FALSE(fs::exists(dir / ".run.staging"));

  SUBCASE("existing output is refused") {
    CHECK(run_cli("generate --repo " + quote(manifest) + " --levels L1 --per-point 1 --out " + quote(run)).exit_code != 0);
  }

  SUBCASE("evaluate") {
    const std::string ann = run + "/annotations.jsonl";
    const std::string oracle = (dir / "oracle.jsonl").string();
    write_file(oracle, predictions_jsonl(center_oracle(records)));
    r = run_cli("evaluate --annotations " + quote(ann) + " --predictions " + quote(oracle));
    REQUIRE(r.exit_code == 0);
    CHECK(nlohmann::json::parse(r.out)["overall_accuracy"] == 1.0);

    const std::string empty = (dir / "empty.jsonl").string();
    write_file(empty, "");
    r = run_cli("evaluate --annotations " + quote(ann) + " --predictions " + quote(empty));
    REQUIRE(r.exit_code == 0);
    const auto rep = nlohmann::json::parse(r.out);
    CHECK(rep["overall_accuracy"] == 0.0);
    CHECK(rep["unmatched"].size() == 10);

    PredictionSet dup = center_oracle(records);
    dup.records.push_back(dup.records.front());
    write_file(oracle, predictions_jsonl(dup));
    CHECK(run_cli("evaluate --annotations " + quote(ann) + " --predictions " + quote(oracle)).exit_code == 1);
    CHECK(run_cli("evaluate --annotations " + quote(ann) + " --predictions " + quote(empty) + " --mode loose")
              .exit_code == 2);
  }

  SUBCASE("validate-sample") {
    const std::string ann = run + "/annotations.jsonl";
    const std::string sheets = (dir / "sheets").string();
    r = run_cli("validate-sample --annotations " + quote(ann) + " --n 4 --seed 3 --annotators 2 --out " +
                quote(sheets));
    REQUIRE(r.exit_code == 0);
    const auto one = slurp(fs::path(sheets) / "annotator_1.csv");
    CHECK(one == slurp(fs::path(sheets) / "annotator_2.csv"));
    Worksheet w = parse_worksheet(one);
    REQUIRE(w.rows.size() == 4);

    // Blank judgments cannot be aggregated.
    CHECK(run_cli("validate-sample --aggregate " + quote(sheets)).exit_code == 1);
    for (auto& row : w.rows) row.judgments = {true, true, false};
    write_file(fs::path(sheets) / "annotator_1.csv", worksheet_csv(w));
    write_file(fs::path(sheets) / "annotator_2.csv", worksheet_csv(w));
    const std::string report = (dir / "report.json").string();
    r = run_cli("validate-sample --aggregate " + quote(sheets) + " --report " + quote(report));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("Overall") != std::string::npos);
    CHECK(fs::exists(report));

    CHECK(run_cli("validate-sample --annotations " + quote(ann) + " --n 11 --out " + quote(sheets)).exit_code != 0);
  }

  SUBCASE("worker count does not change output") {
    const std::string a = (dir / "w1").string();
    const std::string b = (dir / "w3").string();
    const std::string common = "generate --repo " + quote(manifest) + " --protocol occlusion --per-point 3 --seed 5 ";
    REQUIRE(run_cli(common + "--workers 1 --out " + quote(a)).exit_code == 0);
    REQUIRE(run_cli(common + "--out " + quote(b), "DESKSCENE_WORKERS=3").exit_code == 0);
    CHECK(slurp(fs::path(a) / "annotations.jsonl") == slurp(fs::path(b) / "annotations.jsonl"));
    const auto ma = nlohmann::json::parse(slurp(fs::path(a) / "run_manifest.json"));
    const auto mb = nlohmann::json::parse(slurp(fs::path(b) / "run_manifest.json"));
    CHECK(ma["images_sha256"] == mb["images_sha256"]);
    CHECK(mb["workers"] == 3);
    CHECK(read_annotations(fs::path(a) / "annotations.jsonl").size() == 3 * default_sweep("occlusion").size());
  }
}

TEST_CASE("usage errors") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("generate --out x").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}
