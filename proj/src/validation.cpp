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

#include "deskscene/validation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "deskscene/rng.hpp"
#include "deskscene/text.hpp"

namespace deskscene {
namespace {

const std::vector<std::string> kColumns = {
    "scene_id", "level", "image", "instruction", "bbox_x", "bbox_y", "bbox_w", "bbox_h",
    "ambiguity_risk", "bbox_accurate", "target_clickable", "multiple_valid_targets"};

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted field in worksheet");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<bool> parse_judgment(const std::string& raw, std::size_t line) {
  const std::string v = to_lower(trim(raw));
  if (v.empty()) return std::nullopt;
  if (v == "1" || v == "true" || v == "yes" || v == "y") return true;
  if (v == "0" || v == "false" || v == "no" || v == "n") return false;
  throw ValidationError("worksheet row " + std::to_string(line) + ": cannot read judgment '" +
                        raw + "'");
}

int parse_int(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("worksheet row " + std::to_string(line) + ": bad integer '" + s + "'");
  }
}

}  // namespace

Worksheet sample_for_validation(const std::vector<SceneRecord>& records, std::size_t n,
                                std::uint64_t seed) {
  if (n > records.size()) {
    throw ValidationError("requested " + std::to_string(n) + " scenes but only " +
                          std::to_string(records.size()) + " are available");
  }
  // Strata keyed by level name; sweep records share the empty key.
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < records.size(); ++i) {
    strata[records[i].spec.constraints.level.value_or("")].push_back(i);
  }

  struct Share {
    std::string key;
    std::size_t quota;
    std::size_t rem_num;  // remainder numerator over records.size()
  };
  std::vector<Share> shares;
  std::size_t assigned = 0;
  for (const auto& [key, idx] : strata) {
    const std::size_t num = n * idx.size();
    shares.push_back({key, num / records.size(), num % records.size()});
    assigned += shares.back().quota;
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shares[a].rem_num > shares[b].rem_num;
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++shares[order[k]].quota;

  Rng rng(seed);
  std::vector<std::size_t> picked;
  for (const auto& share : shares) {
    std::vector<std::size_t> idx = strata[share.key];
    rng.shuffle(idx);
    picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(share.quota));
  }
  std::sort(picked.begin(), picked.end());

  Worksheet w;
  for (std::size_t i : picked) {
    const SceneRecord& r = records[i];
    WorksheetRow row;
    row.scene_id = r.spec.scene_id;
    row.level = r.spec.constraints.level.value_or("");
    row.image = r.image_path;
    row.instruction = r.instruction;
    row.gt_bbox = r.gt_bbox_global;
    row.ambiguity_risk = r.spec.ambiguity_risk;
    w.rows.push_back(std::move(row));
  }
  return w;
}

std::string worksheet_csv(const Worksheet& w) {
  std::string out;
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (c) out += ',';
    out += kColumns[c];
  }
  out += "\r\n";
  for (const auto& r : w.rows) {
    std::vector<std::string> f = {r.scene_id,
                                  r.level,
                                  r.image,
                                  r.instruction,
                                  std::to_string(r.gt_bbox.x),
                                  std::to_string(r.gt_bbox.y),
                                  std::to_string(r.gt_bbox.w),
                                  std::to_string(r.gt_bbox.h),
                                  r.ambiguity_risk ? "1" : "0"};
    for (const auto& j : r.judgments) f.push_back(j ? (*j ? "1" : "0") : "");
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (c) out += ',';
      out += csv_field(f[c]);
    }
    out += "\r\n";
  }
  return out;
}

Worksheet parse_worksheet(std::string_view csv) {
  auto rows = parse_csv(csv);
  if (rows.empty()) throw ValidationError("worksheet is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < rows[0].size(); ++c) col[std::string(trim(rows[0][c]))] = c;
  for (const auto& name : kColumns) {
    if (!col.contains(name)) throw ValidationError("worksheet lacks column '" + name + "'");
  }
  Worksheet w;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    auto get = [&](const std::string& name) -> std::string {
      const std::size_t c = col.at(name);
      return c < f.size() ? f[c] : std::string{};
    };
    WorksheetRow r;
    r.scene_id = get("scene_id");
    if (r.scene_id.empty()) throw ValidationError("worksheet row " + std::to_string(i) + " has no scene_id");
    r.level = get("level");
    r.image = get("image");
    r.instruction = get("instruction");
    r.gt_bbox = Rect{parse_int(get("bbox_x"), i), parse_int(get("bbox_y"), i),
                     parse_int(get("bbox_w"), i), parse_int(get("bbox_h"), i)};
    r.ambiguity_risk = parse_judgment(get("ambiguity_risk"), i).value_or(false);
    for (std::size_t k = 0; k < kJudgmentFields.size(); ++k) {
      r.judgments[k] = parse_judgment(get(std::string(kJudgmentFields[k])), i);
    }
    w.rows.push_back(std::move(r));
  }
  return w;
}

Worksheet load_worksheet(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open worksheet '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_worksheet(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

FleissResult fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty()) throw ValidationError("kappa needs at least one item");
  const std::size_t k = counts[0].size();
  const int n = std::accumulate(counts[0].begin(), counts[0].end(), 0);
  if (n < 2) throw ValidationError("kappa needs at least two raters");
  std::vector<double> p(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : counts) {
    if (row.size() != k || std::accumulate(row.begin(), row.end(), 0) != n) {
      throw ValidationError("every item must be rated by the same raters");
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += static_cast<double>(row[j]) * row[j];
      p[j] += row[j];
    }
    p_bar += (sq - n) / (static_cast<double>(n) * (n - 1));
  }
  const double items = static_cast<double>(counts.size());
  p_bar /= items;
  double p_e = 0.0;
  for (double& pj : p) {
    pj /= items * n;
    p_e += pj * pj;
  }
  if (p_e >= 1.0) return {1.0, true};
  return {(p_bar - p_e) / (1.0 - p_e), false};
}

ValidationReport aggregate_validation(const std::vector<Worksheet>& sheets) {
  if (sheets.empty()) throw ValidationError("no worksheets to aggregate");
  const Worksheet& first = sheets.front();
  std::map<std::string, const WorksheetRow*> base;
  for (const auto& r : first.rows) {
    if (!base.emplace(r.scene_id, &r).second) {
      throw ValidationError("worksheet lists scene '" + r.scene_id + "' twice");
    }
  }
  // judgments[scene][field] = (trues, total)
  std::map<std::string, std::array<std::array<int, 2>, 3>> tally;
  for (std::size_t s = 0; s < sheets.size(); ++s) {
    std::set<std::string> seen;
    for (const auto& r : sheets[s].rows) {
      if (!base.contains(r.scene_id) || !seen.insert(r.scene_id).second) {
        throw ValidationError("worksheet " + std::to_string(s + 1) +
                              " does not cover the same scene set (scene '" + r.scene_id + "')");
      }
      for (std::size_t f = 0; f < 3; ++f) {
        if (!r.judgments[f]) {
          throw ValidationError("worksheet " + std::to_string(s + 1) + " leaves " +
                                std::string(kJudgmentFields[f]) + " blank for scene '" +
                                r.scene_id + "'");
        }
        auto& t = tally[r.scene_id][f];
        t[*r.judgments[f] ? 0 : 1] += 1;
      }
    }
    if (seen.size() != base.size()) {
      throw ValidationError("worksheet " + std::to_string(s + 1) +
                            " does not cover the same scene set");
    }
  }

  ValidationReport rep;
  rep.annotators = sheets.size();
  rep.scenes = base.size();

  std::map<std::string, std::pair<std::size_t, std::array<int, 3>>> by_level;
  std::pair<std::size_t, std::array<int, 3>> overall{0, {0, 0, 0}};
  for (const auto& r : first.rows) {
    const auto& t = tally[r.scene_id];
    auto& lv = by_level[r.level];
    ++lv.first;
    ++overall.first;
    for (std::size_t f = 0; f < 3; ++f) {
      lv.second[f] += t[f][0];
      overall.second[f] += t[f][0];
    }
  }
  auto rates = [&](const std::pair<std::size_t, std::array<int, 3>>& v) {
    LevelRates lr;
    lr.scenes = v.first;
    const double denom = static_cast<double>(v.first * sheets.size());
    for (std::size_t f = 0; f < 3; ++f) lr.rates[f] = denom > 0 ? v.second[f] / denom : 0.0;
    return lr;
  };
  rep.levels.emplace_back("Overall", rates(overall));
  for (const auto& [level, v] : by_level) {
    if (!level.empty()) rep.levels.emplace_back(level, rates(v));
  }

  if (sheets.size() >= 2 && !first.rows.empty()) {
    std::vector<std::vector<int>> pooled;
    for (std::size_t f = 0; f < 3; ++f) {
      std::vector<std::vector<int>> counts;
      for (const auto& r : first.rows) {
        const auto& t = tally[r.scene_id][f];
        counts.push_back({t[0], t[1]});
        pooled.push_back({t[0], t[1]});
      }
      rep.kappa[f] = fleiss_kappa(counts);
    }
    rep.pooled_kappa = fleiss_kappa(pooled);
  }
  return rep;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& [name, r] : levels) {
    nlohmann::json e{{"level", name}, {"scenes", r.scenes}};
    for (std::size_t f = 0; f < 3; ++f) e[std::string(kJudgmentFields[f])] = r.rates[f];
    lv.push_back(std::move(e));
  }
  auto kj = [](const std::optional<FleissResult>& k) -> nlohmann::json {
    if (!k) return nullptr;
    return {{"kappa", k->kappa}, {"degenerate_marginals", k->degenerate}};
  };
  nlohmann::json kappas = nlohmann::json::object();
  for (std::size_t f = 0; f < 3; ++f) kappas[std::string(kJudgmentFields[f])] = kj(kappa[f]);
  return {{"annotators", annotators},
          {"scenes", scenes},
          {"levels", std::move(lv)},
          {"fleiss_kappa", std::move(kappas)},
          {"fleiss_kappa_pooled", kj(pooled_kappa)}};
}

std::string ValidationReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %7s %14s %17s %23s\n", "Level", "scenes", "BBox Accuracy",
                "Target Clickable", "Multiple Valid Targets");
  os << buf;
  for (const auto& [name, r] : levels) {
    std::snprintf(buf, sizeof buf, "%-14s %7zu %13.2f%% %16.2f%% %22.2f%%\n", name.c_str(),
                  r.scenes, 100 * r.rates[0], 100 * r.rates[1], 100 * r.rates[2]);
    os << buf;
  }
  os << "annotators " << annotators << "\n";
  for (std::size_t f = 0; f < 3; ++f) {
    os << "kappa " << kJudgmentFields[f] << ": ";
    if (!kappa[f]) {
      os << "n/a\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.4f%s\n", kappa[f]->kappa,
                    kappa[f]->degenerate ? " (degenerate marginals)" : "");
      os << buf;
    }
  }
  if (pooled_kappa) {
    std::snprintf(buf, sizeof buf, "kappa pooled: %.4f%s\n", pooled_kappa->kappa,
                  pooled_kappa->degenerate ? " (degenerate marginals)" : "");
    os << buf;
  }
  return os.str();
}

}  // namespace deskscene
