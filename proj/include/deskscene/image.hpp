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

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "deskscene/geometry.hpp"

namespace deskscene {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Packed 8-bit RGB raster, row-major, no padding.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  [[nodiscard]] std::uint8_t* pixel(int x, int y) {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  [[nodiscard]] const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  [[nodiscard]] Rect bounds() const { return Rect{0, 0, width, height}; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Decodes a PNG to RGB8. Alpha is dropped, not composited.
Image read_png(const std::filesystem::path& path);

/// Reads only the header; cheaper than a full decode.
std::pair<int, int> png_dimensions(const std::filesystem::path& path);

/// Encodes RGB8 losslessly. Output bytes are a pure function of the pixels.
std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);

/// Exact pixel copy of `rect`; throws ImageError when rect leaves the image.
Image crop(const Image& image, const Rect& rect);

}  // namespace deskscene
