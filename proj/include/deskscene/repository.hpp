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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "deskscene/geometry.hpp"
#include "deskscene/rng.hpp"

namespace deskscene {

/// Closed application taxonomy; every window carries exactly one.
enum class DomainCategory {
  Productivity,
  Browsers,
  Communication,
  MediaEnt,
  Utilities,
  DeveloperTools,
  FileSystem,
  Gaming,
  AdvancedTools,
};

inline constexpr std::array<DomainCategory, 9> kAllCategories = {
    DomainCategory::Productivity,   DomainCategory::Browsers,
    DomainCategory::Communication,  DomainCategory::MediaEnt,
    DomainCategory::Utilities,      DomainCategory::DeveloperTools,
    DomainCategory::FileSystem,     DomainCategory::Gaming,
    DomainCategory::AdvancedTools,
};

std::string_view to_string(DomainCategory c);

/// Case-insensitive; punctuation and spaces are ignored, so "Media & Ent"
/// and "mediaent" both resolve.
std::optional<DomainCategory> parse_category(std::string_view name);

struct ElementAnnotation {
  std::string id;
  std::string instruction;
  Rect bbox;  // window-local pixels
  std::optional<std::size_t> embedding_ref;

  friend bool operator==(const ElementAnnotation&, const ElementAnnotation&) = default;
};

struct WindowAsset {
  std::string id;
  std::string app_name;
  DomainCategory category = DomainCategory::Productivity;
  std::string image;                // as written in the manifest
  std::filesystem::path image_path; // resolved against the manifest directory
  int width = 0;
  int height = 0;
  std::vector<ElementAnnotation> elements;

  [[nodiscard]] Rect bounds() const { return Rect{0, 0, width, height}; }
  [[nodiscard]] const ElementAnnotation* find_element(std::string_view id) const;

  friend bool operator==(const WindowAsset& a, const WindowAsset& b) {
    return a.id == b.id && a.app_name == b.app_name && a.category == b.category &&
           a.image == b.image && a.width == b.width && a.height == b.height &&
           a.elements == b.elements;
  }
};

enum class Severity { Error, Warning };

enum class FindingCode {
  ManifestSyntax,
  UnknownCategory,
  MissingImage,
  DimensionMismatch,
  OversizeWindow,
  NoElements,
  DuplicateId,
  BadBBox,
  ZeroAreaElement,
  EmptyInstruction,
  DuplicateInstruction,
  MissingEmbedding,
};

std::string_view to_string(FindingCode c);

struct Finding {
  Severity severity = Severity::Error;
  FindingCode code = FindingCode::ManifestSyntax;
  std::string asset_id;
  std::string field;  // e.g. "assets[2].elements[0].bbox"
  std::string message;

  [[nodiscard]] std::string describe() const;
};

bool has_errors(const std::vector<Finding>& findings);

class RepositoryError : public std::runtime_error {
 public:
  explicit RepositoryError(std::vector<Finding> findings);
  [[nodiscard]] const std::vector<Finding>& findings() const { return findings_; }

 private:
  std::vector<Finding> findings_;
};

struct CategoryStats {
  std::size_t assets = 0;
  std::size_t elements = 0;
};

/// Immutable, indexed set of window assets.
class Repository {
 public:
  Repository() = default;
  /// Builds indices only; call validate_repository() for invariant checks.
  explicit Repository(std::vector<WindowAsset> assets, std::string digest = {});

  [[nodiscard]] const std::vector<WindowAsset>& assets() const { return assets_; }
  [[nodiscard]] std::size_t size() const { return assets_.size(); }
  [[nodiscard]] const WindowAsset* find(std::string_view id) const;
  /// Throws std::out_of_range for unknown ids.
  [[nodiscard]] const WindowAsset& at(std::string_view id) const;
  [[nodiscard]] const std::map<DomainCategory, std::vector<std::string>>& by_category() const {
    return by_category_;
  }
  [[nodiscard]] std::map<DomainCategory, CategoryStats> stats() const;
  [[nodiscard]] std::size_t element_count() const;
  /// SHA-256 over the manifest and image bytes; empty for in-memory repos.
  [[nodiscard]] const std::string& digest() const { return digest_; }

 private:
  std::vector<WindowAsset> assets_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<DomainCategory, std::vector<std::string>> by_category_;
  std::string digest_;
};

/// Parses, checks images, validates; throws RepositoryError listing every
/// error finding when any invariant fails.
Repository load_repository(const std::filesystem::path& manifest_path);

/// Invariant checks over an in-memory repository. Empty iff clean.
std::vector<Finding> validate_repository(const Repository& repo);

nlohmann::json manifest_json(const Repository& repo);
void save_repository(const Repository& repo, const std::filesystem::path& manifest_path);

struct TargetPair {
  const WindowAsset* window = nullptr;
  const ElementAnnotation* element = nullptr;
};

/// Uniform over (window, element) pairs, optionally restricted to one
/// category. Throws std::invalid_argument when the filtered set is empty.
TargetPair sample_target(const Repository& repo, Rng& rng,
                         std::optional<DomainCategory> filter = std::nullopt);

}  // namespace deskscene
