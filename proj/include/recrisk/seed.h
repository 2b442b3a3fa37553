// Copyright 2026 The Recrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECRISK_SEED_H_
#define RECRISK_SEED_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "absl/strings/string_view.h"

namespace recrisk {

// A 64-bit seed. Every source of randomness in the library takes one
// explicitly; there is no global generator.
struct Seed {
  uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

// One SplitMix64 step: the output for generator state `x`. Bijective on
// 64-bit words.
uint64_t Mix64(uint64_t x);

// FNV-1a over the bytes of `text`.
uint64_t HashString(absl::string_view text);

// Parses exactly 1 to 16 hex digits.
bool ParseHex64(absl::string_view text, uint64_t* out);

// Derives the seed of a sub-task from its parent seed, a purpose tag, and an
// index:
//
//   Mix64(Mix64(parent ^ HashString(tag)) + Mix64(index + 0x9e3779b97f4a7c15))
//
// Distinct (tag, index) pairs give statistically independent streams, and the
// result depends only on its inputs, so work can be scheduled in any order.
Seed DeriveSeed(Seed parent, absl::string_view tag, uint64_t index = 0);

// Pseudo-random stream seeded from a Seed. The engine is std::mt19937_64,
// whose output sequence is fixed by the standard; the distributions below are
// implemented here rather than taken from <random> so that streams are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(Mix64(seed.value)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double UniformDouble();

  // Uniform on [0, bound). `bound` must be positive.
  uint64_t UniformInt(uint64_t bound);

  bool Bernoulli(double p) { return UniformDouble() < p; }

  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);

  // Index drawn from unnormalized non-negative `weights`. Falls back to the
  // last positive entry when rounding leaves the draw past the total.
  size_t Categorical(std::span<const double> weights);

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace recrisk

#endif  // RECRISK_SEED_H_
