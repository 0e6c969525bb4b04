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

#include "deskscene/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "deskscene/text.hpp"

namespace deskscene {
namespace {

using nlohmann::json;
using SparseTf = std::vector<std::pair<std::string, double>>;

SparseTf unit_tf(std::string_view text) {
  std::map<std::string, double> counts;
  for (auto& t : alnum_tokens(text)) counts[std::move(t)] += 1.0;
  double norm = 0.0;
  for (const auto& [_, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  SparseTf out(counts.begin(), counts.end());
  if (norm > 0.0) {
    for (auto& [_, c] : out) c /= norm;
  }
  return out;
}

double sparse_dot(const SparseTf& a, const SparseTf& b) {
  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot, 0.0, 1.0);
}

}  // namespace

std::string element_key(std::string_view window_id, std::string_view element_id) {
  std::string k(window_id);
  k += '/';
  k += element_id;
  return k;
}

EmbeddingTable::EmbeddingTable(int dim, std::string model_tag)
    : dim_(dim), model_tag_(std::move(model_tag)) {
  if (dim <= 0) throw EmbeddingError("embedding dim must be positive");
}

void EmbeddingTable::add(std::string key, std::vector<double> vector) {
  if (static_cast<int>(vector.size()) != dim_) {
    throw EmbeddingError("vector for '" + key + "' has " + std::to_string(vector.size()) +
                         " entries, expected " + std::to_string(dim_));
  }
  double norm = 0.0;
  for (double v : vector) {
    if (!std::isfinite(v)) throw EmbeddingError("vector for '" + key + "' is not finite");
    norm += v * v;
  }
  if (norm == 0.0) throw EmbeddingError("vector for '" + key + "' is all zeros");
  if (!index_.emplace(key, vectors_.size()).second) {
    throw EmbeddingError("duplicate embedding key '" + key + "'");
  }
  keys_.push_back(std::move(key));
  vectors_.push_back(std::move(vector));
}

const std::vector<double>* EmbeddingTable::find(std::string_view key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

const std::vector<double>* EmbeddingTable::lookup(const WindowAsset& window,
                                                  const ElementAnnotation& element) const {
  if (element.embedding_ref) {
    return *element.embedding_ref < vectors_.size() ? &vectors_[*element.embedding_ref] : nullptr;
  }
  return find(element_key(window.id, element.id));
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EmbeddingError("cannot open embeddings file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  auto next_record = [&]() -> std::optional<json> {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        return json::parse(line);
      } catch (const json::parse_error& e) {
        throw EmbeddingError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    return std::nullopt;
  };

  auto header = next_record();
  if (!header || !header->is_object() || !header->contains("dim") ||
      !header->contains("count")) {
    throw EmbeddingError(path.string() + ": missing header with dim and count");
  }
  const int dim = header->at("dim").get<int>();
  const auto count = header->at("count").get<std::size_t>();
  EmbeddingTable table(dim, header->value("model_tag", std::string{}));
  while (auto rec = next_record()) {
    try {
      table.add(rec->at("element").get<std::string>(),
                rec->at("vector").get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw EmbeddingError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const EmbeddingError& e) {
      throw EmbeddingError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (table.size() != count) {
    throw EmbeddingError(path.string() + ": header count " + std::to_string(count) +
                         " but " + std::to_string(table.size()) + " records");
  }
  return table;
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EmbeddingError("cannot write '" + path.string() + "'");
  out << json{{"format", "deskscene-embeddings"},
              {"dim", dim_},
              {"model_tag", model_tag_},
              {"count", vectors_.size()}}
             .dump()
      << "\n";
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    out << json{{"element", keys_[i]}, {"vector", vectors_[i]}}.dump() << "\n";
  }
}

std::vector<Finding> check_embedding_coverage(const EmbeddingTable& table,
                                              const Repository& repo) {
  std::vector<Finding> out;
  for (std::size_t i = 0; i < repo.assets().size(); ++i) {
    const auto& w = repo.assets()[i];
    for (std::size_t j = 0; j < w.elements.size(); ++j) {
      if (table.lookup(w, w.elements[j]) == nullptr) {
        out.push_back(Finding{Severity::Warning, FindingCode::MissingEmbedding, w.id,
                              "assets[" + std::to_string(i) + "].elements[" +
                                  std::to_string(j) + "]",
                              "no embedding for element '" + w.elements[j].id + "'"});
      }
    }
  }
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::optional<double> window_score(std::span<const double> target, const WindowAsset& window,
                                   const EmbeddingTable& table) {
  std::optional<double> best;
  for (const auto& e : window.elements) {
    if (const auto* v = table.lookup(window, e)) {
      const double s = cosine(target, *v);
      if (!best || s > *best) best = s;
    }
  }
  return best;
}

double lexical_fallback_score(std::string_view text_a, std::string_view text_b) {
  return sparse_dot(unit_tf(text_a), unit_tf(text_b));
}

json SimilarWindowSequence::to_json() const {
  json entries_json = json::array();
  for (const auto& e : entries) entries_json.push_back({{"window_id", e.window_id}, {"score", e.score}});
  return json{{"target_window_id", target_window_id},
              {"target_element_id", target_element_id},
              {"source", source},
              {"entries", std::move(entries_json)}};
}

SimilarityIndex::SimilarityIndex(const Repository& repo, const EmbeddingTable* table)
    : repo_(&repo), table_(table) {
  for (const auto& w : repo.assets()) {
    for (const auto& e : w.elements) tf_.emplace(element_key(w.id, e.id), unit_tf(e.instruction));
  }
}

const SparseTf& SimilarityIndex::tf(const WindowAsset& w, const ElementAnnotation& e) const {
  auto it = tf_.find(element_key(w.id, e.id));
  if (it == tf_.end()) throw std::out_of_range("element not in similarity index");
  return it->second;
}

std::string SimilarityIndex::source_for(const WindowAsset& target_window,
                                        const ElementAnnotation& target) const {
  if (table_ != nullptr && table_->lookup(target_window, target) != nullptr) {
    return "embedding:" + table_->model_tag();
  }
  return std::string(kLexicalSource);
}

double SimilarityIndex::element_score(const WindowAsset& target_window,
                                      const ElementAnnotation& target,
                                      const WindowAsset& other_window,
                                      const ElementAnnotation& other) const {
  if (table_ != nullptr) {
    if (const auto* tv = table_->lookup(target_window, target)) {
      const auto* ov = table_->lookup(other_window, other);
      return ov == nullptr ? -1.0 : cosine(*tv, *ov);
    }
  }
  return sparse_dot(tf(target_window, target), tf(other_window, other));
}

SimilarWindowSequence SimilarityIndex::build_sequence(const WindowAsset& target_window,
                                                      const ElementAnnotation& target) const {
  SimilarWindowSequence seq;
  seq.target_window_id = target_window.id;
  seq.target_element_id = target.id;
  seq.source = source_for(target_window, target);
  const std::vector<double>* target_vec =
      table_ != nullptr ? table_->lookup(target_window, target) : nullptr;

  for (const auto& w : repo_->assets()) {
    if (w.id == target_window.id) continue;
    std::optional<double> score;
    if (target_vec != nullptr) {
      score = window_score(*target_vec, w, *table_);
      if (!score) {
        seq.findings.push_back(Finding{Severity::Warning, FindingCode::MissingEmbedding, w.id,
                                       "", "window has no embedded elements; skipped"});
        continue;
      }
    } else {
      const auto& t = tf(target_window, target);
      double best = 0.0;
      for (const auto& e : w.elements) best = std::max(best, sparse_dot(t, tf(w, e)));
      score = best;
    }
    seq.entries.push_back({w.id, *score});
  }
  std::sort(seq.entries.begin(), seq.entries.end(),
            [](const SimilarWindowEntry& a, const SimilarWindowEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.window_id < b.window_id;
            });
  return seq;
}

}  // namespace deskscene
