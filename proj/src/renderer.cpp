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

#include "deskscene/renderer.hpp"

#include <cstring>
#include <vector>

namespace deskscene {

Image placeholder_background() {
  Image bg(kCanvasWidth, kCanvasHeight);
  for (int y = 0; y < kCanvasHeight; ++y) {
    for (int x = 0; x < kCanvasWidth; ++x) {
      std::uint8_t* p = bg.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(20 + (x * 60) / kCanvasWidth);
      p[1] = static_cast<std::uint8_t>(60 + (y * 80) / kCanvasHeight);
      p[2] = static_cast<std::uint8_t>(140 + ((x + y) * 90) / (kCanvasWidth + kCanvasHeight));
    }
  }
  return bg;
}

Image load_background(const std::filesystem::path& path) {
  Image bg = read_png(path);
  if (bg.width != kCanvasWidth || bg.height != kCanvasHeight) {
    throw ImageError("background '" + path.string() + "' is " + std::to_string(bg.width) + "x" +
                     std::to_string(bg.height) + ", expected " + std::to_string(kCanvasWidth) +
                     "x" + std::to_string(kCanvasHeight));
  }
  return bg;
}

std::shared_ptr<const Image> ImageStore::get(const WindowAsset& asset) {
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(asset.id); it != cache_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
  }
  // Decode outside the lock; a racing duplicate decode is harmless.
  auto img = std::make_shared<const Image>(read_png(asset.image_path));
  if (img->width != asset.width || img->height != asset.height) {
    throw ImageError("image for window '" + asset.id + "' changed size since load");
  }
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(asset.id); it != cache_.end()) return it->second.first;
  lru_.push_front(asset.id);
  cache_.emplace(asset.id, std::make_pair(img, lru_.begin()));
  while (cache_.size() > capacity_ && !lru_.empty()) {
    cache_.erase(lru_.back());
    lru_.pop_back();
  }
  return img;
}

namespace {

void blit(Image& canvas, std::vector<std::uint16_t>& owner, const Image& src, IPoint origin,
          std::uint16_t layer) {
  auto clip = intersect(canvas.bounds(), Rect{origin.x, origin.y, src.width, src.height});
  if (!clip) return;
  for (int y = clip->y; y < clip->bottom(); ++y) {
    std::memcpy(canvas.pixel(clip->x, y), src.pixel(clip->x - origin.x, y - origin.y),
                static_cast<std::size_t>(clip->w) * 3);
    auto row = owner.begin() + static_cast<std::ptrdiff_t>(y) * canvas.width + clip->x;
    std::fill(row, row + clip->w, layer);
  }
}

CoverageMask mask_from_owner(const std::vector<std::uint16_t>& owner, const Rect& region,
                             std::uint16_t layer) {
  CoverageMask mask(region);
  for (int y = region.y; y < region.bottom(); ++y) {
    for (int x = region.x; x < region.right(); ++x) {
      if (!canvas_rect().contains(x, y) ||
          owner[static_cast<std::size_t>(y) * kCanvasWidth + x] != layer) {
        mask.mark(x, y);
      }
    }
  }
  return mask;
}

}  // namespace

RenderResult render(const SceneSpec& spec, const Repository& repo, const Image& background,
                    ImageStore& images) {
  if (background.width != kCanvasWidth || background.height != kCanvasHeight) {
    throw ImageError("background must be " + std::to_string(kCanvasWidth) + "x" +
                     std::to_string(kCanvasHeight));
  }
  const SceneGeometry geom = scene_geometry(spec, repo);
  Image canvas = background;
  std::vector<std::uint16_t> owner(static_cast<std::size_t>(kCanvasWidth) * kCanvasHeight, 0);

  std::uint16_t layer = 0;
  for (const auto& d : spec.distractors) {
    if (d.role != ZRole::BackgroundBelow) continue;
    blit(canvas, owner, *images.get(repo.at(d.window_id)), d.origin, ++layer);
  }
  const std::uint16_t target_layer = ++layer;
  blit(canvas, owner, *images.get(repo.at(spec.target_window_id)), spec.target_origin,
       target_layer);
  for (const auto& d : spec.distractors) {
    if (d.role != ZRole::OccluderAbove) continue;
    blit(canvas, owner, *images.get(repo.at(d.window_id)), d.origin, ++layer);
  }

  CoverageMask element_mask = mask_from_owner(owner, geom.target_element, target_layer);
  CoverageMask window_mask = mask_from_owner(owner, geom.target_window, target_layer);
  return RenderResult{std::move(canvas), std::move(element_mask), std::move(window_mask)};
}

Image crop_window_region(const Image& canvas, const Rect& rect) { return crop(canvas, rect); }

}  // namespace deskscene
