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

#include "deskscene/fixture.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "deskscene/image.hpp"
#include "deskscene/rng.hpp"
#include "deskscene/text.hpp"

namespace deskscene {
namespace {

constexpr std::array<std::string_view, 16> kActions = {
    "login", "search", "settings", "save", "open", "close", "share", "download",
    "upload", "play", "refresh", "delete", "send", "export", "filter", "new"};
constexpr std::array<std::string_view, 6> kWidgets = {"button", "icon", "field", "menu", "tab",
                                                      "link"};

std::array<std::uint8_t, 3> base_color(DomainCategory c, int variant) {
  const int k = static_cast<int>(c);
  return {static_cast<std::uint8_t>(60 + (k * 37) % 160),
          static_cast<std::uint8_t>(70 + (k * 71 + variant * 40) % 150),
          static_cast<std::uint8_t>(90 + (k * 53 + variant * 25) % 140)};
}

void fill(Image& img, const Rect& r, std::array<std::uint8_t, 3> c) {
  for (int y = r.y; y < r.bottom(); ++y) {
    for (int x = r.x; x < r.right(); ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = c[0];
      p[1] = c[1];
      p[2] = c[2];
    }
  }
}

bool overlaps_any(const Rect& r, const std::vector<ElementAnnotation>& els) {
  const Rect padded{r.x - 8, r.y - 8, r.w + 16, r.h + 16};
  for (const auto& e : els) {
    if (intersect(padded, e.bbox)) return true;
  }
  return false;
}

}  // namespace

std::filesystem::path write_fixture_repository(const std::filesystem::path& dir,
                                               const FixtureOptions& options) {
  std::filesystem::create_directories(dir / "windows");
  Rng rng(options.seed);
  std::vector<WindowAsset> assets;
  for (DomainCategory cat : kAllCategories) {
    for (int v = 0; v < options.windows_per_category; ++v) {
      WindowAsset a;
      const std::string stem = to_lower(std::string(to_string(cat)));
      a.id = stem + "-" + std::to_string(v);
      a.app_name = std::string(to_string(cat)) + " App " + std::to_string(v + 1);
      a.category = cat;
      a.width = static_cast<int>(rng.uniform_int(480, 1280));
      a.height = static_cast<int>(rng.uniform_int(360, 900));
      a.image = "windows/" + a.id + ".png";

      const int n_el = static_cast<int>(rng.uniform_int(3, 5));
      std::vector<std::string> used;
      for (int e = 0; e < n_el; ++e) {
        std::string instruction;
        do {
          instruction = std::string(kActions[rng.index(kActions.size())]) + " " +
                        std::string(kWidgets[rng.index(kWidgets.size())]);
        } while (std::find(used.begin(), used.end(), instruction) != used.end());
        used.push_back(instruction);
        for (int attempt = 0; attempt < 500; ++attempt) {
          const int w = static_cast<int>(rng.uniform_int(24, 160));
          const int h = static_cast<int>(rng.uniform_int(16, 48));
          const Rect r{static_cast<int>(rng.uniform_int(8, a.width - w - 8)),
                       static_cast<int>(rng.uniform_int(40, a.height - h - 8)), w, h};
          if (!overlaps_any(r, a.elements)) {
            a.elements.push_back({"e" + std::to_string(e), instruction, r, std::nullopt});
            break;
          }
        }
      }

      Image img(a.width, a.height);
      const auto c = base_color(cat, v);
      fill(img, img.bounds(), c);
      fill(img, Rect{0, 0, a.width, 32},
           {static_cast<std::uint8_t>(c[0] / 2), static_cast<std::uint8_t>(c[1] / 2),
            static_cast<std::uint8_t>(c[2] / 2)});
      for (const auto& el : a.elements) {
        fill(img, el.bbox, {235, 235, 235});
        fill(img, Rect{el.bbox.x + 2, el.bbox.y + 2, el.bbox.w - 4, el.bbox.h - 4},
             {static_cast<std::uint8_t>(255 - c[0]), static_cast<std::uint8_t>(255 - c[1]),
              static_cast<std::uint8_t>(255 - c[2])});
      }
      write_png(dir / a.image, img);
      assets.push_back(std::move(a));
    }
  }
  const auto manifest = dir / "manifest.json";
  save_repository(Repository(std::move(assets)), manifest);
  return manifest;
}

EmbeddingTable hashed_embeddings(const Repository& repo, int dim) {
  EmbeddingTable table(dim, "hashed-bow-" + std::to_string(dim));
  for (const auto& a : repo.assets()) {
    for (const auto& e : a.elements) {
      std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
      for (const auto& tok : alnum_tokens(e.instruction)) {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char ch : tok) h = (h ^ ch) * 1099511628211ULL;
        v[mix64(h) % static_cast<std::uint64_t>(dim)] += 1.0;
      }
      if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
      table.add(element_key(a.id, e.id), std::move(v));
    }
  }
  return table;
}

}  // namespace deskscene
