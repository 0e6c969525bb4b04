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
#include <random>
#include <utility>
#include <vector>

namespace deskscene {

/// Seeded random stream with platform-independent output.
///
/// std::mt19937_64's raw sequence is fixed by the standard, but the standard
/// distributions are not, so integer and real draws are derived here from
/// the engine bits directly. Replays are therefore byte-identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in the inclusive range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  /// Uniform double in [0, 1) with 53 bits of resolution.
  double unit();
  /// lo + (hi - lo) * unit(); returns lo exactly when lo == hi.
  double uniform_real(double lo, double hi);
  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; stateless and well mixed.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent per-scene seed from a master seed and indices.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0);

}  // namespace deskscene
