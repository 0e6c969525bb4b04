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

#include "deskscene/repository.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "deskscene/digest.hpp"
#include "deskscene/image.hpp"
#include "deskscene/text.hpp"

namespace deskscene {
namespace {

using nlohmann::json;

std::string rect_string(const Rect& r) {
  std::ostringstream os;
  os << "(" << r.x << "," << r.y << "," << r.w << "," << r.h << ")";
  return os.str();
}

std::string field_path(std::size_t asset, std::string_view tail) {
  return "assets[" + std::to_string(asset) + "]" + std::string(tail);
}

std::string element_path(std::size_t asset, std::size_t element, std::string_view tail) {
  return field_path(asset, ".elements[" + std::to_string(element) + "]" + std::string(tail));
}

Finding error(FindingCode code, std::string asset_id, std::string field, std::string message) {
  return Finding{Severity::Error, code, std::move(asset_id), std::move(field), std::move(message)};
}

}  // namespace

std::string_view to_string(DomainCategory c) {
  switch (c) {
    case DomainCategory::Productivity: return "Productivity";
    case DomainCategory::Browsers: return "Browsers";
    case DomainCategory::Communication: return "Communication";
    case DomainCategory::MediaEnt: return "MediaEnt";
    case DomainCategory::Utilities: return "Utilities";
    case DomainCategory::DeveloperTools: return "DeveloperTools";
    case DomainCategory::FileSystem: return "FileSystem";
    case DomainCategory::Gaming: return "Gaming";
    case DomainCategory::AdvancedTools: return "AdvancedTools";
  }
  return "?";
}

std::optional<DomainCategory> parse_category(std::string_view name) {
  std::string key;
  for (const auto& t : alnum_tokens(name)) key += t;
  for (DomainCategory c : kAllCategories) {
    if (to_lower(to_string(c)) == key) return c;
  }
  return std::nullopt;
}

std::string_view to_string(FindingCode c) {
  switch (c) {
    case FindingCode::ManifestSyntax: return "manifest_syntax";
    case FindingCode::UnknownCategory: return "unknown_category";
    case FindingCode::MissingImage: return "missing_image";
    case FindingCode::DimensionMismatch: return "dimension_mismatch";
    case FindingCode::OversizeWindow: return "oversize_window";
    case FindingCode::NoElements: return "no_elements";
    case FindingCode::DuplicateId: return "duplicate_id";
    case FindingCode::BadBBox: return "bad_bbox";
    case FindingCode::ZeroAreaElement: return "zero_area_element";
    case FindingCode::EmptyInstruction: return "empty_instruction";
    case FindingCode::DuplicateInstruction: return "duplicate_instruction";
    case FindingCode::MissingEmbedding: return "missing_embedding";
  }
  return "?";
}

std::string Finding::describe() const {
  std::string out = severity == Severity::Error ? "error" : "warning";
  out += " [";
  out += to_string(code);
  out += "]";
  if (!asset_id.empty()) out += " asset '" + asset_id + "'";
  if (!field.empty()) out += " at " + field;
  out += ": " + message;
  return out;
}

bool has_errors(const std::vector<Finding>& findings) {
  for (const auto& f : findings) {
    if (f.severity == Severity::Error) return true;
  }
  return false;
}

namespace {
std::string join_findings(const std::vector<Finding>& findings) {
  std::string out = "repository rejected";
  for (const auto& f : findings) {
    if (f.severity == Severity::Error) {
      out += "\n  " + f.describe();
    }
  }
  return out;
}
}  // namespace

RepositoryError::RepositoryError(std::vector<Finding> findings)
    : std::runtime_error(join_findings(findings)), findings_(std::move(findings)) {}

const ElementAnnotation* WindowAsset::find_element(std::string_view id) const {
  for (const auto& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Repository::Repository(std::vector<WindowAsset> assets, std::string digest)
    : assets_(std::move(assets)), digest_(std::move(digest)) {
  for (std::size_t i = 0; i < assets_.size(); ++i) {
    index_.emplace(assets_[i].id, i);
    by_category_[assets_[i].category].push_back(assets_[i].id);
  }
}

const WindowAsset* Repository::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &assets_[it->second];
}

const WindowAsset& Repository::at(std::string_view id) const {
  if (const auto* w = find(id)) return *w;
  throw std::out_of_range("unknown window id '" + std::string(id) + "'");
}

std::map<DomainCategory, CategoryStats> Repository::stats() const {
  std::map<DomainCategory, CategoryStats> out;
  for (const auto& a : assets_) {
    auto& s = out[a.category];
    ++s.assets;
    s.elements += a.elements.size();
  }
  return out;
}

std::size_t Repository::element_count() const {
  std::size_t n = 0;
  for (const auto& a : assets_) n += a.elements.size();
  return n;
}

std::vector<Finding> validate_repository(const Repository& repo) {
  std::vector<Finding> out;
  std::set<std::string> seen_assets;
  for (std::size_t i = 0; i < repo.assets().size(); ++i) {
    const WindowAsset& a = repo.assets()[i];
    if (!seen_assets.insert(a.id).second) {
      out.push_back(error(FindingCode::DuplicateId, a.id, field_path(i, ".id"),
                          "duplicate window id"));
    }
    if (a.width <= 0 || a.height <= 0) {
      out.push_back(error(FindingCode::DimensionMismatch, a.id, field_path(i, ".width"),
                          "window dimensions must be positive"));
    }
    if (a.width > kCanvasWidth || a.height > kCanvasHeight) {
      out.push_back(error(FindingCode::OversizeWindow, a.id, field_path(i, ".width"),
                          "window " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                              " exceeds the " + std::to_string(kCanvasWidth) + "x" +
                              std::to_string(kCanvasHeight) + " canvas"));
    }
    if (a.elements.empty()) {
      out.push_back(error(FindingCode::NoElements, a.id, field_path(i, ".elements"),
                          "window has no element annotations"));
    }
    std::set<std::string> seen_elements;
    std::map<std::string, std::string> seen_instructions;
    for (std::size_t j = 0; j < a.elements.size(); ++j) {
      const ElementAnnotation& e = a.elements[j];
      if (!seen_elements.insert(e.id).second) {
        out.push_back(error(FindingCode::DuplicateId, a.id, element_path(i, j, ".id"),
                            "duplicate element id '" + e.id + "'"));
      }
      if (!e.bbox.valid()) {
        out.push_back(error(FindingCode::ZeroAreaElement, a.id, element_path(i, j, ".bbox"),
                            "element '" + e.id + "' bbox " + rect_string(e.bbox) +
                                " has zero area"));
      } else if (!a.bounds().contains(e.bbox)) {
        out.push_back(error(FindingCode::BadBBox, a.id, element_path(i, j, ".bbox"),
                            "element '" + e.id + "' bbox " + rect_string(e.bbox) +
                                " exceeds window bounds " + rect_string(a.bounds())));
      }
      const std::string text(trim(e.instruction));
      if (text.empty()) {
        out.push_back(error(FindingCode::EmptyInstruction, a.id,
                            element_path(i, j, ".instruction"),
                            "element '" + e.id + "' has an empty instruction"));
      } else if (auto [it, fresh] = seen_instructions.emplace(text, e.id); !fresh) {
        out.push_back(Finding{Severity::Warning, FindingCode::DuplicateInstruction, a.id,
                              element_path(i, j, ".instruction"),
                              "element '" + e.id + "' repeats the instruction of '" +
                                  it->second + "'"});
      }
    }
  }
  return out;
}

Repository load_repository(const std::filesystem::path& manifest_path) {
  std::vector<Finding> findings;
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) {
    findings.push_back(error(FindingCode::ManifestSyntax, "", manifest_path.string(),
                             "cannot open manifest"));
    throw RepositoryError(std::move(findings));
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    findings.push_back(error(FindingCode::ManifestSyntax, "", manifest_path.string(), e.what()));
    throw RepositoryError(std::move(findings));
  }
  if (!doc.is_object() || !doc.contains("assets") || !doc["assets"].is_array()) {
    findings.push_back(error(FindingCode::ManifestSyntax, "", "assets",
                             "manifest must be an object with an 'assets' array"));
    throw RepositoryError(std::move(findings));
  }

  const auto base = manifest_path.parent_path();
  Sha256 digest;
  digest.update(text);

  std::vector<WindowAsset> assets;
  const auto& arr = doc["assets"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& ja = arr[i];
    WindowAsset a;
    try {
      a.id = ja.at("id").get<std::string>();
      a.app_name = ja.value("app_name", std::string{});
      a.image = ja.at("image").get<std::string>();
      a.width = ja.at("width").get<int>();
      a.height = ja.at("height").get<int>();
      const auto cat_name = ja.at("category").get<std::string>();
      auto cat = parse_category(cat_name);
      if (!cat) {
        findings.push_back(error(FindingCode::UnknownCategory, a.id, field_path(i, ".category"),
                                 "unknown category '" + cat_name + "'"));
        continue;
      }
      a.category = *cat;
      const auto& jel = ja.at("elements");
      for (std::size_t j = 0; j < jel.size(); ++j) {
        const json& je = jel[j];
        ElementAnnotation e;
        e.id = je.at("id").get<std::string>();
        e.instruction = je.at("instruction").get<std::string>();
        const auto& b = je.at("bbox");
        if (!b.is_array() || b.size() != 4) {
          findings.push_back(error(FindingCode::ManifestSyntax, a.id,
                                   element_path(i, j, ".bbox"),
                                   "bbox must be [x, y, w, h]"));
          continue;
        }
        e.bbox = Rect{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        if (je.contains("embedding_ref") && !je["embedding_ref"].is_null()) {
          e.embedding_ref = je["embedding_ref"].get<std::size_t>();
        }
        a.elements.push_back(std::move(e));
      }
    } catch (const json::exception& e) {
      findings.push_back(error(FindingCode::ManifestSyntax, a.id, field_path(i, ""), e.what()));
      continue;
    }

    a.image_path = base / a.image;
    if (!std::filesystem::is_regular_file(a.image_path)) {
      findings.push_back(error(FindingCode::MissingImage, a.id, field_path(i, ".image"),
                               "image file '" + a.image_path.string() + "' not found"));
    } else {
      try {
        auto [w, h] = png_dimensions(a.image_path);
        if (w != a.width || h != a.height) {
          findings.push_back(error(FindingCode::DimensionMismatch, a.id,
                                   field_path(i, ".width"),
                                   "manifest says " + std::to_string(a.width) + "x" +
                                       std::to_string(a.height) + " but image is " +
                                       std::to_string(w) + "x" + std::to_string(h)));
        }
        digest.update(a.id).update_file(a.image_path);
      } catch (const ImageError& e) {
        findings.push_back(error(FindingCode::MissingImage, a.id, field_path(i, ".image"),
                                 e.what()));
      }
    }
    assets.push_back(std::move(a));
  }

  Repository repo(std::move(assets), digest.finish());
  auto structural = validate_repository(repo);
  findings.insert(findings.end(), structural.begin(), structural.end());
  if (has_errors(findings)) throw RepositoryError(std::move(findings));
  return repo;
}

nlohmann::json manifest_json(const Repository& repo) {
  json assets = json::array();
  for (const auto& a : repo.assets()) {
    json elements = json::array();
    for (const auto& e : a.elements) {
      json je = {{"id", e.id},
                 {"instruction", e.instruction},
                 {"bbox", {e.bbox.x, e.bbox.y, e.bbox.w, e.bbox.h}}};
      if (e.embedding_ref) je["embedding_ref"] = *e.embedding_ref;
      elements.push_back(std::move(je));
    }
    assets.push_back({{"id", a.id},
                      {"app_name", a.app_name},
                      {"category", std::string(to_string(a.category))},
                      {"image", a.image},
                      {"width", a.width},
                      {"height", a.height},
                      {"elements", std::move(elements)}});
  }
  return json{{"format", "deskscene-manifest"}, {"version", 1}, {"assets", std::move(assets)}};
}

void save_repository(const Repository& repo, const std::filesystem::path& manifest_path) {
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + manifest_path.string() + "'");
  out << manifest_json(repo).dump(2) << "\n";
}

TargetPair sample_target(const Repository& repo, Rng& rng, std::optional<DomainCategory> filter) {
  std::size_t total = 0;
  for (const auto& a : repo.assets()) {
    if (!filter || a.category == *filter) total += a.elements.size();
  }
  if (total == 0) throw std::invalid_argument("no (window, element) pairs to sample from");
  std::size_t k = rng.index(total);
  for (const auto& a : repo.assets()) {
    if (filter && a.category != *filter) continue;
    if (k < a.elements.size()) return {&a, &a.elements[k]};
    k -= a.elements.size();
  }
  throw std::logic_error("sample_target: index out of range");
}

}  // namespace deskscene
