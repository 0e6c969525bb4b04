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

#include "deskscene/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace deskscene {
namespace {

struct Interval {
  int lo;
  int hi;
};

// Prior interval along one axis, intersected with the anchors that keep a
// window of `size` inside [0, extent).
Interval clamped_axis(double f0, double f1, int size, int extent) {
  const int feasible_hi = extent - size;
  int lo = static_cast<int>(std::ceil(f0 * extent));
  int hi = static_cast<int>(std::floor(f1 * extent));
  if (hi < lo) hi = lo;
  if (lo > feasible_hi) return {feasible_hi, feasible_hi};
  if (hi < 0) return {0, 0};
  return {std::max(lo, 0), std::min(hi, feasible_hi)};
}

int clamp_anchor(int v, int size, int extent) { return std::clamp(v, 0, extent - size); }

Rect window_rect(const WindowAsset& w, IPoint origin) {
  return Rect{origin.x, origin.y, w.width, w.height};
}

// Offsets `a` of a span of length `len` such that [a, a+len) overlaps
// [e0, e0+elen) in exactly `k` cells, chosen at random among the edge-aligned
// (and, where the overlap saturates, interior) solutions.
int overlap_offset(int e0, int elen, int len, int k, Rng& rng) {
  if (k == elen) {
    // Span covers the whole element extent; any offset in the plateau works.
    return static_cast<int>(rng.uniform_int(e0 + elen - len, e0));
  }
  if (k == len) {
    // Span narrower than the element sits fully inside it.
    return static_cast<int>(rng.uniform_int(e0, e0 + elen - len));
  }
  return rng.bernoulli(0.5) ? e0 + k - len : e0 + elen - k;
}

struct Shape {
  int kx;
  int ky;
};

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(ZRole r) {
  return r == ZRole::OccluderAbove ? "occluder_above" : "background_below";
}

std::size_t SceneSpec::occluder_count() const {
  return static_cast<std::size_t>(std::count_if(
      distractors.begin(), distractors.end(),
      [](const DistractorPlacement& d) { return d.role == ZRole::OccluderAbove; }));
}

InfeasibleScene::InfeasibleScene(std::uint64_t seed_, double best, const std::string& why)
    : std::runtime_error("infeasible scene (seed " + std::to_string(seed_) +
                         ", best visibility " + format_value(best) + "): " + why),
      seed(seed_),
      best_visibility(best) {}

SceneConstraints constraints_for_level(const DifficultyLevel& level, const SynthesisConfig& cfg) {
  SceneConstraints c;
  c.protocol = "levels";
  c.tag = level.name;
  c.level = level.name;
  c.n_win = level.n_win;
  c.goal = level.visible;
  c.accept = RealRange{std::max(level.visible.lo, cfg.visibility_floor), level.visible.hi};
  c.l_sim = level.l_sim;
  return c;
}

SceneConstraints single_window_constraints() {
  SceneConstraints c;
  c.protocol = "levels";
  c.tag = std::string(kSingleWindowLevel);
  c.level = std::string(kSingleWindowLevel);
  c.n_win = {1, 1};
  c.goal = {1.0, 1.0};
  c.accept = {1.0, 1.0};
  c.l_sim = 0;
  c.single_window = true;
  return c;
}

SceneConstraints constraints_for_sweep(std::string_view factor, double value,
                                       const SynthesisConfig& cfg, int similarity_n_win) {
  SceneConstraints c;
  c.protocol = std::string(factor);
  c.factor = std::string(factor);
  c.sweep_value = value;
  c.tag = std::string(factor) + "=" + format_value(value);
  if (factor == "clutter") {
    const int n = static_cast<int>(std::lround(value));
    if (n < 2 || std::abs(value - n) > 1e-9) {
      throw ConfigError("clutter sweep values must be integers >= 2");
    }
    c.n_win = {n, n};
    c.l_sim = 0;
  } else if (factor == "occlusion") {
    if (!(value >= cfg.visibility_floor && value <= 1.0)) {
      throw ConfigError("occlusion sweep values must lie in [visibility_floor, 1]");
    }
    c.n_win = {2, 2};
    c.goal = {value, value};
    c.accept = value >= 1.0
                   ? RealRange{1.0, 1.0}
                   : RealRange{std::max(value - cfg.delta, cfg.visibility_floor),
                               std::min(value + cfg.delta, 1.0)};
    c.l_sim = 0;
  } else if (factor == "similarity") {
    const int l = static_cast<int>(std::lround(value));
    if (l < 1 || std::abs(value - l) > 1e-9) {
      throw ConfigError("similarity sweep values must be integers >= 1");
    }
    if (l > similarity_n_win - 1) {
      throw ConfigError("similarity sweep value exceeds the fixed distractor count");
    }
    c.n_win = {similarity_n_win, similarity_n_win};
    c.l_sim = l;
  } else {
    throw ConfigError("unknown sweep factor '" + std::string(factor) + "'");
  }
  return c;
}

SceneParams get_params(const SceneConstraints& c, Rng& rng) {
  SceneParams p;
  p.n_win = static_cast<int>(rng.uniform_int(c.n_win.lo, c.n_win.hi));
  p.visible_goal = rng.uniform_real(c.goal.lo, c.goal.hi);
  p.l_sim = c.l_sim;
  return p;
}

SceneParams get_params(const DifficultyLevel& level, Rng& rng) {
  SceneConstraints c;
  c.n_win = level.n_win;
  c.goal = level.visible;
  c.l_sim = level.l_sim;
  return get_params(c, rng);
}

IPoint apply_spatial_prior(const NormalizedRegion& region, int width, int height, Rng& rng) {
  if (width <= 0 || height <= 0 || width > kCanvasWidth || height > kCanvasHeight) {
    throw UnplaceableWindow("window " + std::to_string(width) + "x" + std::to_string(height) +
                            " does not fit the canvas");
  }
  const Interval ix = clamped_axis(region.x0, region.x1, width, kCanvasWidth);
  const Interval iy = clamped_axis(region.y0, region.y1, height, kCanvasHeight);
  const int x = static_cast<int>(rng.uniform_int(ix.lo, ix.hi));
  const int y = static_cast<int>(rng.uniform_int(iy.lo, iy.hi));
  return {x, y};
}

IPoint apply_spatial_prior(const PriorTable& priors, DomainCategory category, int width,
                           int height, Rng& rng) {
  return apply_spatial_prior(priors.prior(category).region, width, height, rng);
}

IPoint prior_center(const NormalizedRegion& region, int width, int height) {
  if (width <= 0 || height <= 0 || width > kCanvasWidth || height > kCanvasHeight) {
    throw UnplaceableWindow("window does not fit the canvas");
  }
  const Interval ix = clamped_axis(region.x0, region.x1, width, kCanvasWidth);
  const Interval iy = clamped_axis(region.y0, region.y1, height, kCanvasHeight);
  return {(ix.lo + ix.hi) / 2, (iy.lo + iy.hi) / 2};
}

SceneGeometry scene_geometry(const SceneSpec& spec, const Repository& repo) {
  SceneGeometry g;
  const WindowAsset& tw = repo.at(spec.target_window_id);
  const ElementAnnotation* te = tw.find_element(spec.target_element_id);
  if (te == nullptr) {
    throw std::out_of_range("unknown element '" + spec.target_element_id + "' in window '" +
                            tw.id + "'");
  }
  g.target_window = window_rect(tw, spec.target_origin);
  g.target_element = to_global(te->bbox, spec.target_origin).rect;
  for (const auto& d : spec.distractors) {
    const Rect r = window_rect(repo.at(d.window_id), d.origin);
    (d.role == ZRole::OccluderAbove ? g.occluders : g.backgrounds).push_back(r);
  }
  return g;
}

namespace {

struct Attempt {
  Rng& rng;
  const SimilarityIndex& index;
  const SynthesisConfig& cfg;
  const SceneConstraints& c;
  std::uint64_t seed;
  double best_visibility = 0.0;
  int position_samples = 0;

  double track(double v, const RealRange& band) {
    auto dist = [&](double x) {
      return x < band.lo ? band.lo - x : (x > band.hi ? x - band.hi : 0.0);
    };
    if (dist(v) < dist(best_visibility) || position_samples == 0) best_visibility = v;
    return v;
  }

  IPoint background_anchor(const WindowAsset& w, LayoutMode layout,
                           const std::optional<IPoint>& prev) {
    ++position_samples;
    if (layout == LayoutMode::Cascade && prev) {
      return {clamp_anchor(prev->x + cfg.cascade_offset, w.width, kCanvasWidth),
              clamp_anchor(prev->y + cfg.cascade_offset, w.height, kCanvasHeight)};
    }
    IPoint p = apply_spatial_prior(cfg.priors, w.category, w.width, w.height, rng);
    if (layout == LayoutMode::Tiling) {
      const int cw = kCanvasWidth / cfg.tiling_columns;
      const int ch = kCanvasHeight / cfg.tiling_rows;
      p = {clamp_anchor(p.x / cw * cw, w.width, kCanvasWidth),
           clamp_anchor(p.y / ch * ch, w.height, kCanvasHeight)};
    }
    return p;
  }

  // Places an occluder so the union coverage of the target element lands in
  // `band`. Among up to eight valid placements, the one nearest a prior
  // sample wins.
  std::optional<IPoint> tuned_occluder(const WindowAsset& w, const Rect& element,
                                       const std::vector<Rect>& above, const RealRange& band) {
    const int max_kx = std::min(element.w, w.width);
    const int max_ky = std::min(element.h, w.height);
    const double area = static_cast<double>(element.area());
    std::vector<Shape> shapes;
    for (int kx = 1; kx <= max_kx; ++kx) {
      for (int ky = 1; ky <= max_ky; ++ky) {
        const double alone = 1.0 - kx * static_cast<double>(ky) / area;
        // Extra occluders only lower visibility further, so a shape whose
        // own visibility is already below the band can never work.
        if (alone < band.lo - 1e-12) continue;
        if (above.empty() && alone > band.hi + 1e-12) continue;
        shapes.push_back({kx, ky});
      }
    }
    if (shapes.empty()) return std::nullopt;

    const IPoint prior = apply_spatial_prior(cfg.priors, w.category, w.width, w.height, rng);
    std::vector<IPoint> found;
    for (int t = 0; t < cfg.max_attempts && found.size() < 8; ++t) {
      ++position_samples;
      const Shape s = shapes[rng.index(shapes.size())];
      const IPoint p{overlap_offset(element.x, element.w, w.width, s.kx, rng),
                     overlap_offset(element.y, element.h, w.height, s.ky, rng)};
      std::vector<Rect> rects = above;
      rects.push_back(window_rect(w, p));
      const double v = track(analytic_visible_ratio(element, rects), band);
      if (band.contains(v, 1e-12)) found.push_back(p);
    }
    if (found.empty()) return std::nullopt;
    auto dist2 = [&](const IPoint& p) {
      const double dx = p.x - prior.x;
      const double dy = p.y - prior.y;
      return dx * dx + dy * dy;
    };
    return *std::min_element(found.begin(), found.end(), [&](const IPoint& a, const IPoint& b) {
      return dist2(a) < dist2(b);
    });
  }

  std::optional<SceneSpec> run() {
    SceneSpec spec;
    spec.seed = seed;
    spec.constraints = c;
    spec.prior_table_version = cfg.priors.version;
    const Repository& repo = index.repo();

    const SceneParams params = get_params(c, rng);
    spec.n_win = params.n_win;
    spec.l_sim = params.l_sim;
    spec.requested_visible = params.visible_goal;

    const TargetPair target = sample_target(repo, rng);
    const WindowAsset& tw = *target.window;
    const ElementAnnotation& te = *target.element;
    spec.target_window_id = tw.id;
    spec.target_element_id = te.id;
    spec.similarity_source = index.source_for(tw, te);

    if (c.single_window) {
      spec.layout = LayoutMode::Single;
      spec.target_origin = prior_center(cfg.priors.prior(tw.category).region, tw.width, tw.height);
      return spec;
    }

    spec.layout = rng.bernoulli(cfg.cascade_probability) ? LayoutMode::Cascade : LayoutMode::Tiling;
    ++position_samples;
    spec.target_origin = apply_spatial_prior(cfg.priors, tw.category, tw.width, tw.height, rng);
    const Rect element = to_global(te.bbox, spec.target_origin).rect;
    const Rect target_rect = window_rect(tw, spec.target_origin);

    // Distractor selection: head of the similar-window sequence first, then
    // uniform picks without replacement from everything else.
    const std::size_t n_distractors = static_cast<std::size_t>(params.n_win - 1);
    const SimilarWindowSequence seq = index.build_sequence(tw, te);
    std::vector<const WindowAsset*> chosen;
    std::set<std::string> used{tw.id};
    const std::size_t head = std::min<std::size_t>(
        {static_cast<std::size_t>(params.l_sim), seq.entries.size(), n_distractors});
    for (std::size_t i = 0; i < head; ++i) {
      chosen.push_back(&repo.at(seq.entries[i].window_id));
      used.insert(seq.entries[i].window_id);
      spec.similar_head.push_back(seq.entries[i].window_id);
    }
    std::vector<const WindowAsset*> pool;
    for (const auto& w : repo.assets()) {
      if (!used.contains(w.id)) pool.push_back(&w);
    }
    const std::size_t fill = n_distractors - head;
    for (std::size_t i = 0; i < fill; ++i) {
      const std::size_t j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      chosen.push_back(pool[i]);
    }

    const bool occluding = params.visible_goal < 1.0;
    const std::size_t n_occ =
        occluding ? std::min<std::size_t>(static_cast<std::size_t>(cfg.occluders_above_count),
                                          chosen.size())
                  : 0;
    if (occluding && n_occ == 0) {
      throw SynthesisError("visibility goal below 1 needs occluders_above_count >= 1");
    }

    // The occluder band: near the goal, inside the acceptance range.
    const RealRange band{std::max({params.visible_goal - cfg.delta, c.accept.lo, cfg.visibility_floor}),
                         std::min(params.visible_goal + cfg.delta, c.accept.hi)};
    if (band.hi < band.lo) return std::nullopt;

    std::optional<IPoint> prev_background;
    std::vector<Rect> above;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      const WindowAsset& w = *chosen[i];
      DistractorPlacement d;
      d.window_id = w.id;
      d.semantic = i < head;
      const bool is_occluder = i >= chosen.size() - n_occ;
      d.role = is_occluder ? ZRole::OccluderAbove : ZRole::BackgroundBelow;

      if (!is_occluder) {
        // Background windows sit beneath the target and cannot change its
        // visibility, so the placement guard always holds.
        d.origin = background_anchor(w, spec.layout, prev_background);
        prev_background = d.origin;
      } else if (i + 1 < chosen.size()) {
        // Extra occluders: prior samples, kept while the running visibility
        // stays above goal - delta.
        bool placed = false;
        for (int t = 0; t < cfg.max_attempts; ++t) {
          ++position_samples;
          const IPoint p = apply_spatial_prior(cfg.priors, w.category, w.width, w.height, rng);
          std::vector<Rect> rects = above;
          rects.push_back(window_rect(w, p));
          const double v = track(analytic_visible_ratio(element, rects), band);
          if (v >= params.visible_goal - cfg.delta) {
            d.origin = p;
            placed = true;
            break;
          }
        }
        if (!placed) return std::nullopt;
        above.push_back(window_rect(w, d.origin));
      } else {
        auto p = tuned_occluder(w, element, above, band);
        if (!p) return std::nullopt;
        d.origin = *p;
        above.push_back(window_rect(w, d.origin));
      }
      spec.distractors.push_back(std::move(d));
    }

    spec.predicted_element_visibility = analytic_visible_ratio(element, above);
    spec.predicted_window_visibility = analytic_visible_ratio(target_rect, above);
    track(spec.predicted_element_visibility, band);
    if (!c.accept.contains(spec.predicted_element_visibility) ||
        spec.predicted_element_visibility < cfg.visibility_floor - 1e-9) {
      return std::nullopt;
    }

    // Near-duplicate elements left fully visible elsewhere on screen.
    std::vector<Rect> painted_later;
    for (std::size_t i = spec.distractors.size(); i-- > 0;) {
      const auto& d = spec.distractors[i];
      const WindowAsset& w = repo.at(d.window_id);
      std::vector<Rect> cover;
      if (d.role == ZRole::BackgroundBelow) {
        cover = painted_later;
        cover.push_back(target_rect);
        cover.insert(cover.end(), above.begin(), above.end());
      } else {
        // Occluders are painted in order; only later occluders sit above.
        for (std::size_t k = i + 1; k < spec.distractors.size(); ++k) {
          if (spec.distractors[k].role == ZRole::OccluderAbove) {
            cover.push_back(window_rect(repo.at(spec.distractors[k].window_id),
                                        spec.distractors[k].origin));
          }
        }
      }
      for (const auto& e : w.elements) {
        if (index.element_score(tw, te, w, e) < cfg.ambiguity_threshold) continue;
        const Rect g = to_global(e.bbox, d.origin).rect;
        if (!canvas_rect().contains(g)) continue;
        if (analytic_visible_ratio(g, cover) >= 1.0) {
          spec.ambiguity_risk = true;
          spec.ambiguous_windows.push_back(w.id);
          break;
        }
      }
      if (d.role == ZRole::BackgroundBelow) painted_later.push_back(window_rect(w, d.origin));
    }
    std::sort(spec.ambiguous_windows.begin(), spec.ambiguous_windows.end());
    return spec;
  }
};

}  // namespace

SceneSpec synthesize_scene(const SimilarityIndex& index, const SynthesisConfig& cfg,
                           const SceneConstraints& constraints, std::uint64_t seed) {
  const Repository& repo = index.repo();
  if (repo.size() == 0) throw SynthesisError("repository is empty");
  if (!constraints.single_window &&
      repo.size() < static_cast<std::size_t>(constraints.n_win.hi)) {
    throw SynthesisError("scene '" + constraints.tag + "' needs up to " +
                         std::to_string(constraints.n_win.hi) + " windows but the repository has " +
                         std::to_string(repo.size()));
  }
  if (constraints.l_sim > constraints.n_win.lo - 1 && !constraints.single_window) {
    throw SynthesisError("l_sim exceeds the distractor count for '" + constraints.tag + "'");
  }

  Rng rng(seed);
  double best = 0.0;
  int samples = 0;
  for (int retry = 0; retry < cfg.max_scene_retries; ++retry) {
    Attempt attempt{rng, index, cfg, constraints, seed};
    auto spec = attempt.run();
    samples += attempt.position_samples;
    if (retry == 0 || std::abs(attempt.best_visibility - constraints.goal.lo) <
                          std::abs(best - constraints.goal.lo)) {
      best = attempt.best_visibility;
    }
    if (spec) {
      spec->scene_retries = retry;
      spec->position_samples = samples;
      return *std::move(spec);
    }
  }
  throw InfeasibleScene(seed, best,
                        "no placement within " + std::to_string(cfg.max_scene_retries) +
                            " scene retries for '" + constraints.tag + "'");
}

}  // namespace deskscene
