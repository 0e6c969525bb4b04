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

#include "deskscene/image.hpp"

#include <png.h>

#include <cstring>
#include <fstream>

namespace deskscene {
namespace {

struct PngImageGuard {
  png_image image;
  PngImageGuard() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImageGuard() { png_image_free(&image); }
  PngImageGuard(const PngImageGuard&) = delete;
  PngImageGuard& operator=(const PngImageGuard&) = delete;
};

}  // namespace

std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
  PngImageGuard g;
  if (!png_image_begin_read_from_file(&g.image, path.c_str())) {
    throw ImageError("cannot read image '" + path.string() +
                     "': " + g.image.message);
  }
  return {static_cast<int>(g.image.width), static_cast<int>(g.image.height)};
}

Image read_png(const std::filesystem::path& path) {
  PngImageGuard g;
  if (!png_image_begin_read_from_file(&g.image, path.c_str())) {
    throw ImageError("cannot read image '" + path.string() +
                     "': " + g.image.message);
  }
  // Decode with alpha so libpng never composites; the channel is then dropped.
  g.image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(g.image));
  if (!png_image_finish_read(&g.image, nullptr, rgba.data(), 0, nullptr)) {
    throw ImageError("cannot decode image '" + path.string() +
                     "': " + g.image.message);
  }
  Image out(static_cast<int>(g.image.width), static_cast<int>(g.image.height));
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(&out.rgb[i * 3], &rgba[i * 4], 3);
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width <= 0 || image.height <= 0) {
    throw ImageError("cannot encode an empty image");
  }
  PngImageGuard g;
  g.image.width = static_cast<png_uint_32>(image.width);
  g.image.height = static_cast<png_uint_32>(image.height);
  g.image.format = PNG_FORMAT_RGB;
  g.image.flags = PNG_IMAGE_FLAG_FAST;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&g.image, nullptr, &size, 0, image.rgb.data(),
                                 0, nullptr)) {
    throw ImageError(std::string("png size query failed: ") + g.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&g.image, out.data(), &size, 0,
                                 image.rgb.data(), 0, nullptr)) {
    throw ImageError(std::string("png encode failed: ") + g.image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  const auto bytes = encode_png(image);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ImageError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ImageError("short write to '" + path.string() + "'");
}

Image crop(const Image& image, const Rect& rect) {
  if (!rect.valid() || !image.bounds().contains(rect)) {
    throw ImageError("crop rect lies outside the image");
  }
  Image out(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    std::memcpy(out.pixel(0, y), image.pixel(rect.x, rect.y + y),
                static_cast<std::size_t>(rect.w) * 3);
  }
  return out;
}

}  // namespace deskscene
