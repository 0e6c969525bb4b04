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

#include "deskscene/repository.hpp"
#include "deskscene/similarity.hpp"

namespace deskscene {

struct FixtureOptions {
  int windows_per_category = 2;
  std::uint64_t seed = 1;
};

/// Writes a small synthetic window repository (flat-colored screenshots plus
/// manifest.json) into `dir` and returns the manifest path. Output depends
/// only on the options.
std::filesystem::path write_fixture_repository(const std::filesystem::path& dir,
                                               const FixtureOptions& options = {});

/// Hashed bag-of-words vectors for every element. Deterministic, and
/// identical instructions map to identical vectors.
EmbeddingTable hashed_embeddings(const Repository& repo, int dim = 64);

}  // namespace deskscene
