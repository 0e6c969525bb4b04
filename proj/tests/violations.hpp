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

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "support.hpp"

namespace deskscene::testing {

struct Violation {
  std::string name;
  FindingCode expected;
  std::string expected_asset;
  std::function<void(nlohmann::json&, const std::filesystem::path&)> mutate;
};

/// The six invariant violations every loader must reject.
inline std::vector<Violation> repository_violations() {
  return {
      {"bad bbox", FindingCode::BadBBox, "w0",
       [](nlohmann::json& m, const std::filesystem::path&) {
         m["assets"][0]["elements"][1]["bbox"] = {180, 10, 40, 20};  // x+w = 220 > 200
       }},
      {"duplicate id", FindingCode::DuplicateId, "w0",
       [](nlohmann::json& m, const std::filesystem::path&) {
         m["assets"][0]["elements"][1]["id"] = "send";
       }},
      {"oversize window", FindingCode::OversizeWindow, "big",
       [](nlohmann::json& m, const std::filesystem::path& dir) {
         write_blank_png(dir / "big.png", 2600, 100);
         nlohmann::json a = m["assets"][0];
         a["id"] = "big";
         a["image"] = "big.png";
         a["width"] = 2600;
         m["assets"].push_back(a);
       }},
      {"zero-area element", FindingCode::ZeroAreaElement, "w0",
       [](nlohmann::json& m, const std::filesystem::path&) {
         m["assets"][0]["elements"][0]["bbox"] = {10, 10, 0, 20};
       }},
      {"missing image", FindingCode::MissingImage, "w0",
       [](nlohmann::json& m, const std::filesystem::path&) { m["assets"][0]["image"] = "gone.png"; }},
      {"unknown category", FindingCode::UnknownCategory, "w0",
       [](nlohmann::json& m, const std::filesystem::path&) {
         m["assets"][0]["category"] = "Spreadsheets";
       }},
  };
}

/// Writes the base manifest plus image into `dir`, applies `v` and returns
/// the manifest path.
inline std::filesystem::path write_violation(const Violation& v, const std::filesystem::path& dir) {
  write_blank_png(dir / "w0.png", 200, 100);
  nlohmann::json m = one_window_manifest();
  v.mutate(m, dir);
  const auto path = dir / "manifest.json";
  write_file(path, m.dump(2));
  return path;
}

/// True iff loading fails with an error finding of the expected code on the
/// expected asset.
inline bool rejected_with(const Violation& v, const std::filesystem::path& manifest) {
  try {
    (void)load_repository(manifest);
  } catch (const RepositoryError& e) {
    return std::any_of(e.findings().begin(), e.findings().end(), [&](const Finding& f) {
      return f.severity == Severity::Error && f.code == v.expected && f.asset_id == v.expected_asset;
    });
  }
  return false;
}

}  // namespace deskscene::testing
