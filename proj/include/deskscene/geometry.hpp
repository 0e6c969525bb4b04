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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace deskscene {

inline constexpr int kCanvasWidth = 2560;
inline constexpr int kCanvasHeight = 1440;

/// A location in global canvas pixels. Predictions may fall off-canvas.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Integer anchor (window origin) on the canvas.
struct IPoint {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const IPoint&, const IPoint&) = default;
};

/// Half-open pixel rectangle [x, x+w) x [y, y+h). Origin top-left, y down.
/// A usable rect has w > 0 and h > 0; see valid().
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  [[nodiscard]] constexpr bool valid() const { return w > 0 && h > 0; }
  [[nodiscard]] constexpr std::int64_t area() const {
    return valid() ? static_cast<std::int64_t>(w) * h : 0;
  }
  [[nodiscard]] constexpr int right() const { return x + w; }
  [[nodiscard]] constexpr int bottom() const { return y + h; }
  [[nodiscard]] constexpr bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  [[nodiscard]] constexpr bool contains(const Rect& r) const {
    return r.x >= x && r.y >= y && r.right() <= right() &&
           r.bottom() <= bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

constexpr Rect canvas_rect() { return Rect{0, 0, kCanvasWidth, kCanvasHeight}; }

/// The hit predicate shared by placement checks and click scoring.
bool contains(const Rect& r, const Point& p);

/// Overlap of two rects, or nullopt when their interiors are disjoint.
std::optional<Rect> intersect(const Rect& a, const Rect& b);

struct ProjectedRect {
  Rect rect;
  bool on_canvas = true;  // false when part of rect lies outside the canvas
};

ProjectedRect to_global(const Rect& local, IPoint window_origin);
Rect to_local(const Rect& global, IPoint window_origin);

/// Per-pixel occlusion flags over a region of the canvas.
class CoverageMask {
 public:
  /// Throws std::invalid_argument when region has zero area.
  explicit CoverageMask(const Rect& region);

  [[nodiscard]] const Rect& region() const { return region_; }

  /// Marks the cell at global coordinates (gx, gy); ignored outside region.
  void mark(int gx, int gy);
  /// Marks every cell that `occluder` overlaps.
  void paint(const Rect& occluder);

  [[nodiscard]] bool covered(int gx, int gy) const;
  [[nodiscard]] std::int64_t covered_count() const;
  [[nodiscard]] std::span<const std::uint8_t> cells() const { return cells_; }

 private:
  Rect region_;
  std::vector<std::uint8_t> cells_;
};

/// Number of target pixels lying under the union of occluders.
std::int64_t covered_area(const Rect& target, std::span<const Rect> occluders);

/// Exact fraction of target pixels not covered by the union of occluders.
/// Works on a coordinate-compressed coverage grid, so cost depends on the
/// number of occluders rather than on the target's pixel area.
double analytic_visible_ratio(const Rect& target,
                              std::span<const Rect> occluders);

/// 1 - covered fraction of the mask.
double pixel_visible_ratio(const CoverageMask& mask);

}  // namespace deskscene
