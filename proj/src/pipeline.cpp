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

#include "deskscene/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "deskscene/text.hpp"

namespace deskscene {
namespace {

using nlohmann::json;

json rect_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }
Rect rect_from(const json& j) {
  return Rect{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}
json point_json(IPoint p) { return json::array({p.x, p.y}); }
IPoint point_from(const json& j) { return IPoint{j.at(0).get<int>(), j.at(1).get<int>()}; }

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

LayoutMode layout_from(std::string_view s) {
  if (s == "cascade") return LayoutMode::Cascade;
  if (s == "tiling") return LayoutMode::Tiling;
  if (s == "single") return LayoutMode::Single;
  throw std::invalid_argument("unknown layout mode '" + std::string(s) + "'");
}

ZRole role_from(std::string_view s) {
  if (s == "occluder_above") return ZRole::OccluderAbove;
  if (s == "background_below") return ZRole::BackgroundBelow;
  throw std::invalid_argument("unknown z_role '" + std::string(s) + "'");
}

std::string padded(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

json SceneRecord::to_json() const {
  const SceneSpec& s = spec;
  const SceneConstraints& c = s.constraints;
  json distractors = json::array();
  for (const auto& d : s.distractors) {
    distractors.push_back({{"window_id", d.window_id},
                           {"origin", point_json(d.origin)},
                           {"z_role", std::string(to_string(d.role))},
                           {"semantic", d.semantic}});
  }
  return json{
      {"scene_id", s.scene_id},
      {"index", s.index},
      {"seed", s.seed},
      {"protocol", c.protocol},
      {"tag", c.tag},
      {"level", opt(c.level)},
      {"factor", opt(c.factor)},
      {"sweep_value", opt(c.sweep_value)},
      {"target",
       {{"window_id", s.target_window_id},
        {"element_id", s.target_element_id},
        {"category", std::string(to_string(category))},
        {"origin", point_json(s.target_origin)}}},
      {"instruction", instruction},
      {"gt_bbox", rect_json(gt_bbox_global)},
      {"distractors", std::move(distractors)},
      {"n_win", s.n_win},
      {"l_sim", s.l_sim},
      {"n_win_range", {c.n_win.lo, c.n_win.hi}},
      {"requested_visible", s.requested_visible},
      {"goal_range", {c.goal.lo, c.goal.hi}},
      {"accept_range", {c.accept.lo, c.accept.hi}},
      {"predicted_element_visibility", s.predicted_element_visibility},
      {"predicted_window_visibility", s.predicted_window_visibility},
      {"measured_element_visibility", measured_element_visibility},
      {"measured_window_visibility", measured_window_visibility},
      {"layout_mode", std::string(to_string(s.layout))},
      {"ambiguity_risk", s.ambiguity_risk},
      {"ambiguous_windows", s.ambiguous_windows},
      {"canvas", {s.canvas_width, s.canvas_height}},
      {"background_id", s.background_id},
      {"image", image_path},
      {"provenance",
       {{"similarity_source", s.similarity_source},
        {"similar_head", s.similar_head},
        {"prior_table_version", s.prior_table_version},
        {"engine_version", std::string(kEngineVersion)},
        {"scene_retries", s.scene_retries},
        {"position_samples", s.position_samples},
        {"seed_resamples", s.seed_resamples}}},
  };
}

SceneRecord SceneRecord::from_json(const json& j) {
  SceneRecord r;
  SceneSpec& s = r.spec;
  SceneConstraints& c = s.constraints;
  s.scene_id = j.at("scene_id").get<std::string>();
  s.index = j.value("index", std::uint64_t{0});
  s.seed = j.value("seed", std::uint64_t{0});
  c.protocol = j.value("protocol", std::string("levels"));
  c.tag = j.value("tag", std::string{});
  c.level = opt_from<std::string>(j, "level");
  c.factor = opt_from<std::string>(j, "factor");
  c.sweep_value = opt_from<double>(j, "sweep_value");
  const json& t = j.at("target");
  s.target_window_id = t.at("window_id").get<std::string>();
  s.target_element_id = t.at("element_id").get<std::string>();
  const auto cat_name = t.at("category").get<std::string>();
  auto cat = parse_category(cat_name);
  if (!cat) throw std::invalid_argument("unknown category '" + cat_name + "'");
  r.category = *cat;
  s.target_origin = point_from(t.at("origin"));
  r.instruction = j.at("instruction").get<std::string>();
  r.gt_bbox_global = rect_from(j.at("gt_bbox"));
  for (const auto& jd : j.value("distractors", json::array())) {
    s.distractors.push_back({jd.at("window_id").get<std::string>(), point_from(jd.at("origin")),
                             role_from(jd.at("z_role").get<std::string>()),
                             jd.value("semantic", false)});
  }
  s.n_win = j.value("n_win", 1);
  s.l_sim = j.value("l_sim", 0);
  if (j.contains("n_win_range")) c.n_win = {j["n_win_range"][0].get<int>(), j["n_win_range"][1].get<int>()};
  s.requested_visible = j.value("requested_visible", 1.0);
  if (j.contains("goal_range")) c.goal = {j["goal_range"][0].get<double>(), j["goal_range"][1].get<double>()};
  if (j.contains("accept_range")) c.accept = {j["accept_range"][0].get<double>(), j["accept_range"][1].get<double>()};
  c.l_sim = s.l_sim;
  c.single_window = c.level && *c.level == kSingleWindowLevel;
  s.predicted_element_visibility = j.value("predicted_element_visibility", 1.0);
  s.predicted_window_visibility = j.value("predicted_window_visibility", 1.0);
  r.measured_element_visibility = j.at("measured_element_visibility").get<double>();
  r.measured_window_visibility = j.value("measured_window_visibility", 1.0);
  s.layout = layout_from(j.value("layout_mode", std::string("single")));
  s.ambiguity_risk = j.value("ambiguity_risk", false);
  s.ambiguous_windows = j.value("ambiguous_windows", std::vector<std::string>{});
  if (j.contains("canvas")) {
    s.canvas_width = j["canvas"][0].get<int>();
    s.canvas_height = j["canvas"][1].get<int>();
  }
  s.background_id = j.value("background_id", std::string{});
  r.image_path = j.value("image", std::string{});
  if (j.contains("provenance")) {
    const json& p = j["provenance"];
    s.similarity_source = p.value("similarity_source", std::string{});
    s.similar_head = p.value("similar_head", std::vector<std::string>{});
    s.prior_table_version = p.value("prior_table_version", std::string{});
    s.scene_retries = p.value("scene_retries", 0);
    s.position_samples = p.value("position_samples", 0);
    s.seed_resamples = p.value("seed_resamples", 0);
  }
  return r;
}

VerifyResult verify_scene(const SceneSpec& spec, const Repository& repo,
                          const CoverageMask& element_mask, const CoverageMask& window_mask,
                          const SynthesisConfig& cfg) {
  const SceneGeometry geom = scene_geometry(spec, repo);
  const double measured = pixel_visible_ratio(element_mask);
  if (element_mask.region() != geom.target_element) {
    return Rejection{spec.scene_id, measured, "coverage mask does not match the target element"};
  }
  if (!spec.constraints.accept.contains(measured)) {
    std::ostringstream os;
    os << "measured visibility " << measured << " outside [" << spec.constraints.accept.lo << ", "
       << spec.constraints.accept.hi << "]";
    return Rejection{spec.scene_id, measured, os.str()};
  }
  if (measured < cfg.visibility_floor - 1e-9) {
    return Rejection{spec.scene_id, measured, "measured visibility below the floor"};
  }
  SceneRecord r;
  r.spec = spec;
  const WindowAsset& tw = repo.at(spec.target_window_id);
  r.category = tw.category;
  r.instruction = tw.find_element(spec.target_element_id)->instruction;
  r.gt_bbox_global = geom.target_element;
  r.measured_element_visibility = measured;
  r.measured_window_visibility = pixel_visible_ratio(window_mask);
  r.image_path = "images/" + spec.scene_id + ".png";
  return r;
}

GenerationResult generate_scenes(const SimilarityIndex& index, const SynthesisConfig& cfg,
                                 const std::vector<SceneRequest>& requests,
                                 const GenerationOptions& options) {
  cfg.validate();
  const Repository& repo = index.repo();
  Image placeholder;
  const Image* background = options.background;
  if (background == nullptr) {
    placeholder = placeholder_background();
    background = &placeholder;
  }
  const std::string background_id = options.background_id.empty()
                                        ? std::string(kPlaceholderBackgroundId)
                                        : options.background_id;
  if (options.out_dir) std::filesystem::create_directories(*options.out_dir / "images");

  ImageStore images;
  std::vector<std::optional<SceneRecord>> slots(requests.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> synth_calls{0};
  std::atomic<std::size_t> infeasible{0};
  std::atomic<std::size_t> rejected{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex mu;

  auto worker = [&] {
    try {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) return;
        const SceneRequest& req = requests[i];
        std::string last_reason = "no attempts";
        for (int k = 0; k < cfg.max_seed_resamples && !slots[i]; ++k) {
          const std::uint64_t seed = derive_seed(options.seed, i, static_cast<std::uint64_t>(k));
          ++synth_calls;
          SceneSpec spec;
          try {
            spec = synthesize_scene(index, cfg, req.constraints, seed);
          } catch (const InfeasibleScene& e) {
            ++infeasible;
            last_reason = e.what();
            continue;
          }
          spec.scene_id = req.scene_id;
          spec.index = i;
          spec.seed_resamples = k;
          spec.background_id = background_id;
          RenderResult rr = render(spec, repo, *background, images);
          VerifyResult vr = verify_scene(spec, repo, rr.element_mask, rr.window_mask, cfg);
          if (auto* rej = std::get_if<Rejection>(&vr)) {
            ++rejected;
            last_reason = rej->reason;
            continue;
          }
          if (options.out_dir) {
            write_png(*options.out_dir / "images" / (req.scene_id + ".png"), rr.canvas);
          }
          slots[i] = std::get<SceneRecord>(std::move(vr));
        }
        if (!slots[i]) {
          throw GenerationError("scene '" + req.scene_id + "' could not be generated after " +
                                std::to_string(cfg.max_seed_resamples) +
                                " seeds: " + last_reason);
        }
        const std::size_t n = ++done;
        if (options.progress) {
          std::lock_guard lock(mu);
          options.progress(n, requests.size());
        }
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!first_error) first_error = std::current_exception();
      failed = true;
    }
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(requests.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  GenerationResult result;
  result.records.reserve(slots.size());
  for (auto& s : slots) result.records.push_back(std::move(*s));
  result.stats = {requests.size(), synth_calls.load(), infeasible.load(), rejected.load()};
  return result;
}

std::vector<double> default_sweep(std::string_view factor) {
  if (factor == "clutter") return {2, 4, 6, 8, 10, 12};
  if (factor == "occlusion") return {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3};
  if (factor == "similarity") return {1, 2, 3, 4, 5};
  throw ConfigError("unknown sweep factor '" + std::string(factor) + "'");
}

std::vector<SceneRequest> protocol_one_requests(const SynthesisConfig& cfg,
                                                std::string_view factor,
                                                const std::vector<double>& sweep,
                                                int scenes_per_point) {
  if (sweep.empty()) throw ConfigError("empty sweep");
  if (scenes_per_point < 1) throw ConfigError("scenes per point must be positive");
  // A similarity sweep keeps the window count fixed so only the number of
  // similar distractors varies.
  int similarity_n_win = 2;
  for (double v : sweep) similarity_n_win = std::max(similarity_n_win, static_cast<int>(std::lround(v)) + 1);
  std::vector<SceneRequest> out;
  for (std::size_t p = 0; p < sweep.size(); ++p) {
    const SceneConstraints c = constraints_for_sweep(factor, sweep[p], cfg, similarity_n_win);
    for (int k = 0; k < scenes_per_point; ++k) {
      out.push_back({std::string(factor) + "_p" + padded(p, 2) + "_" +
                         padded(static_cast<std::size_t>(k), 4),
                     c});
    }
  }
  return out;
}

GenerationResult generate_protocol_one(const SimilarityIndex& index, const SynthesisConfig& cfg,
                                       std::string_view factor, const std::vector<double>& sweep,
                                       int scenes_per_point, const GenerationOptions& options) {
  return generate_scenes(index, cfg, protocol_one_requests(cfg, factor, sweep, scenes_per_point),
                         options);
}

std::vector<SceneRequest> protocol_two_requests(const SynthesisConfig& cfg,
                                                const std::vector<std::string>& levels,
                                                int scenes_per_level) {
  if (levels.empty()) throw ConfigError("no levels requested");
  if (scenes_per_level < 1) throw ConfigError("scenes per level must be positive");
  std::vector<SceneRequest> out;
  for (const auto& name : levels) {
    const SceneConstraints c = name == kSingleWindowLevel
                                   ? single_window_constraints()
                                   : constraints_for_level(cfg.level(name), cfg);
    for (int k = 0; k < scenes_per_level; ++k) {
      out.push_back({name + "_" + padded(static_cast<std::size_t>(k), 4), c});
    }
  }
  return out;
}

GenerationResult generate_protocol_two(const SimilarityIndex& index, const SynthesisConfig& cfg,
                                       const std::vector<std::string>& levels,
                                       int scenes_per_level, const GenerationOptions& options) {
  return generate_scenes(index, cfg, protocol_two_requests(cfg, levels, scenes_per_level), options);
}

std::string annotations_jsonl(const std::vector<SceneRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.to_json().dump();
    out += '\n';
  }
  return out;
}

void write_annotations(const std::filesystem::path& path, const std::vector<SceneRecord>& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << annotations_jsonl(records);
  if (!f) throw std::runtime_error("short write to '" + path.string() + "'");
}

std::vector<SceneRecord> read_annotations(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open annotations '" + path.string() + "'");
  std::vector<SceneRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(SceneRecord::from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace deskscene
