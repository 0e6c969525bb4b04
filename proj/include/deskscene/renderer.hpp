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

#include <cstddef>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "deskscene/geometry.hpp"
#include "deskscene/image.hpp"
#include "deskscene/repository.hpp"
#include "deskscene/synthesis.hpp"

namespace deskscene {

inline constexpr std::string_view kPlaceholderBackgroundId = "gradient-placeholder-v1";

/// Deterministic 2560x1440 gradient standing in for a real wallpaper.
Image placeholder_background();
/// Loads a wallpaper; throws ImageError unless it is exactly canvas-sized.
Image load_background(const std::filesystem::path& path);

/// Bounded, thread-safe cache of decoded window screenshots.
class ImageStore {
 public:
  explicit ImageStore(std::size_t capacity = 64) : capacity_(capacity) {}

  /// Decodes on first use; throws ImageError if the file is unreadable or
  /// does not match the asset's declared size.
  std::shared_ptr<const Image> get(const WindowAsset& asset);

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::list<std::string> lru_;
  std::map<std::string, std::pair<std::shared_ptr<const Image>, std::list<std::string>::iterator>>
      cache_;
};

struct RenderResult {
  Image canvas;
  CoverageMask element_mask;  // true where something above overwrote the element
  CoverageMask window_mask;   // same, over the whole target window
};

/// Composites background, background_below distractors, the target, then
/// occluder_above distractors, all opaque and unscaled. Coverage is read off
/// a per-pixel owner plane written during compositing.
RenderResult render(const SceneSpec& spec, const Repository& repo, const Image& background,
                    ImageStore& images);

/// Exact copy of an on-canvas rect; throws ImageError otherwise.
Image crop_window_region(const Image& canvas, const Rect& rect);

}  // namespace deskscene
