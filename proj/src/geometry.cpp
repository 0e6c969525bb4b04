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

#include "deskscene/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace deskscene {

bool contains(const Rect& r, const Point& p) {
  return p.x >= r.x && p.x < static_cast<double>(r.x) + r.w && p.y >= r.y &&
         p.y < static_cast<double>(r.y) + r.h;
}

std::optional<Rect> intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return Rect{x0, y0, x1 - x0, y1 - y0};
}

ProjectedRect to_global(const Rect& local, IPoint window_origin) {
  Rect g{local.x + window_origin.x, local.y + window_origin.y, local.w,
         local.h};
  return {g, canvas_rect().contains(g)};
}

Rect to_local(const Rect& global, IPoint window_origin) {
  return Rect{global.x - window_origin.x, global.y - window_origin.y, global.w,
              global.h};
}

CoverageMask::CoverageMask(const Rect& region) : region_(region) {
  if (!region.valid()) {
    throw std::invalid_argument("coverage mask region must have positive area");
  }
  cells_.assign(static_cast<std::size_t>(region.area()), 0);
}

void CoverageMask::mark(int gx, int gy) {
  if (!region_.contains(gx, gy)) return;
  cells_[static_cast<std::size_t>(gy - region_.y) * region_.w +
         (gx - region_.x)] = 1;
}

void CoverageMask::paint(const Rect& occluder) {
  auto overlap = intersect(region_, occluder);
  if (!overlap) return;
  for (int y = overlap->y; y < overlap->bottom(); ++y) {
    auto row = cells_.begin() +
               static_cast<std::ptrdiff_t>(y - region_.y) * region_.w +
               (overlap->x - region_.x);
    std::fill(row, row + overlap->w, std::uint8_t{1});
  }
}

bool CoverageMask::covered(int gx, int gy) const {
  if (!region_.contains(gx, gy)) return false;
  return cells_[static_cast<std::size_t>(gy - region_.y) * region_.w +
                (gx - region_.x)] != 0;
}

std::int64_t CoverageMask::covered_count() const {
  return std::count(cells_.begin(), cells_.end(), std::uint8_t{1});
}

std::int64_t covered_area(const Rect& target, std::span<const Rect> occluders) {
  if (!target.valid()) return 0;
  std::vector<Rect> clipped;
  clipped.reserve(occluders.size());
  for (const Rect& o : occluders) {
    if (auto c = intersect(target, o)) clipped.push_back(*c);
  }
  if (clipped.empty()) return 0;

  std::vector<int> xs{target.x, target.right()};
  std::vector<int> ys{target.y, target.bottom()};
  for (const Rect& c : clipped) {
    xs.push_back(c.x);
    xs.push_back(c.right());
    ys.push_back(c.y);
    ys.push_back(c.bottom());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  // Cell (i, j) spans [xs[i], xs[i+1]) x [ys[j], ys[j+1]); edges align with
  // every clipped occluder so a cell is either fully covered or not at all.
  std::int64_t total = 0;
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const int cx = xs[i];
      const int cy = ys[j];
      const bool hit = std::any_of(clipped.begin(), clipped.end(),
                                   [&](const Rect& c) { return c.contains(cx, cy); });
      if (hit) {
        total += static_cast<std::int64_t>(xs[i + 1] - xs[i]) *
                 (ys[j + 1] - ys[j]);
      }
    }
  }
  return total;
}

double analytic_visible_ratio(const Rect& target,
                              std::span<const Rect> occluders) {
  if (!target.valid()) {
    throw std::invalid_argument("visible ratio of a zero-area target");
  }
  const std::int64_t covered = covered_area(target, occluders);
  return 1.0 - static_cast<double>(covered) / static_cast<double>(target.area());
}

double pixel_visible_ratio(const CoverageMask& mask) {
  const std::int64_t area = mask.region().area();
  if (area <= 0) throw std::invalid_argument("zero-area coverage mask");
  return 1.0 - static_cast<double>(mask.covered_count()) /
                   static_cast<double>(area);
}

}  // namespace deskscene
