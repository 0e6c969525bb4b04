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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <unistd.h>

#include "json.hpp"

#include "deskscene/fixture.hpp"
#include "deskscene/image.hpp"
#include "deskscene/repository.hpp"

namespace deskscene::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("deskscene-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

/// The default fixture repository, written once per test process.
inline const std::filesystem::path& fixture_manifest() {
  static TempDir dir;
  static std::filesystem::path manifest;
  static std::once_flag once;
  std::call_once(once, [] { manifest = write_fixture_repository(dir.path()); });
  return manifest;
}

inline const Repository& fixture_repo() {
  static const Repository repo = load_repository(fixture_manifest());
  return repo;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << text;
}

/// Solid-color PNG of the given size.
inline void write_blank_png(const std::filesystem::path& p, int w, int h, std::uint8_t v = 128) {
  Image img(w, h);
  std::fill(img.rgb.begin(), img.rgb.end(), v);
  write_png(p, img);
}

/// One-window manifest JSON with a single element; tests mutate it.
inline nlohmann::json one_window_manifest() {
  return nlohmann::json{
      {"format", "deskscene-manifest"},
      {"version", 1},
      {"assets",
       {{{"id", "w0"},
         {"app_name", "Mail"},
         {"category", "Communication"},
         {"image", "w0.png"},
         {"width", 200},
         {"height", 100},
         {"elements",
          {{{"id", "send"}, {"instruction", "send button"}, {"bbox", {10, 10, 40, 20}}},
           {{"id", "inbox"}, {"instruction", "inbox tab"}, {"bbox", {60, 10, 40, 20}}}}}}}}};
}

}  // namespace deskscene::testing
