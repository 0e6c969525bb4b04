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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "deskscene/repository.hpp"

namespace deskscene {

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Key under which an element's vector is stored: "<window_id>/<element_id>".
std::string element_key(std::string_view window_id, std::string_view element_id);

/// Precomputed text embeddings, one vector per element.
///
/// File layout (UTF-8, one JSON object per line):
///   {"format":"deskscene-embeddings","dim":D,"model_tag":"...","count":N}
///   {"element":"<window_id>/<element_id>","vector":[...D floats...]}   x N
/// An element's `embedding_ref` indexes records in file order; otherwise
/// lookup goes through the element key.
class EmbeddingTable {
 public:
  EmbeddingTable(int dim, std::string model_tag);

  /// Throws EmbeddingError on wrong dim, non-finite entries, zero vectors
  /// or duplicate keys.
  void add(std::string key, std::vector<double> vector);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::string& model_tag() const { return model_tag_; }
  [[nodiscard]] std::size_t size() const { return vectors_.size(); }
  [[nodiscard]] const std::vector<std::string>& keys() const { return keys_; }

  [[nodiscard]] const std::vector<double>* find(std::string_view key) const;
  [[nodiscard]] const std::vector<double>* lookup(const WindowAsset& window,
                                                  const ElementAnnotation& element) const;

  static EmbeddingTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  int dim_;
  std::string model_tag_;
  std::vector<std::string> keys_;
  std::vector<std::vector<double>> vectors_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Elements with no vector in `table` (MissingEmbedding warnings).
std::vector<Finding> check_embedding_coverage(const EmbeddingTable& table,
                                              const Repository& repo);

/// dot(a,b) / (|a||b|), clamped to [-1, 1]. Throws std::invalid_argument on
/// dimension mismatch or a zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

/// Max cosine between `target` and the window's embedded elements, or
/// nullopt when the window has none.
std::optional<double> window_score(std::span<const double> target, const WindowAsset& window,
                                   const EmbeddingTable& table);

/// Cosine over term-frequency vectors of lowercased alphanumeric tokens.
double lexical_fallback_score(std::string_view text_a, std::string_view text_b);

struct SimilarWindowEntry {
  std::string window_id;
  double score = 0.0;
  friend bool operator==(const SimilarWindowEntry&, const SimilarWindowEntry&) = default;
};

struct SimilarWindowSequence {
  std::string target_window_id;
  std::string target_element_id;
  std::string source;  // "embedding:<model_tag>" or "lexical-tf"
  std::vector<SimilarWindowEntry> entries;
  std::vector<Finding> findings;  // windows skipped for lack of embeddings

  [[nodiscard]] nlohmann::json to_json() const;
};

inline constexpr std::string_view kLexicalSource = "lexical-tf";

/// Read-only similarity state shared by every scene in a run. Safe to use
/// from concurrent workers once constructed.
class SimilarityIndex {
 public:
  /// `table` may be null; it must outlive the index when given.
  SimilarityIndex(const Repository& repo, const EmbeddingTable* table);

  [[nodiscard]] const Repository& repo() const { return *repo_; }
  [[nodiscard]] const EmbeddingTable* table() const { return table_; }

  /// Windows other than the target's own, by descending max element score,
  /// ties by ascending window id. Falls back to lexical scoring when no
  /// table is loaded or the target element has no vector.
  [[nodiscard]] SimilarWindowSequence build_sequence(const WindowAsset& target_window,
                                                     const ElementAnnotation& target) const;

  /// Score between the target element and one other element under the same
  /// source build_sequence would use for that target.
  [[nodiscard]] double element_score(const WindowAsset& target_window,
                                     const ElementAnnotation& target,
                                     const WindowAsset& other_window,
                                     const ElementAnnotation& other) const;

  [[nodiscard]] std::string source_for(const WindowAsset& target_window,
                                       const ElementAnnotation& target) const;

 private:
  using SparseTf = std::vector<std::pair<std::string, double>>;  // sorted, unit norm
  [[nodiscard]] const SparseTf& tf(const WindowAsset& w, const ElementAnnotation& e) const;

  const Repository* repo_;
  const EmbeddingTable* table_;
  std::map<std::string, SparseTf, std::less<>> tf_;
};

}  // namespace deskscene
