// Copyright 2026 The efpi-lab Authors
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

namespace efpi {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i of stream `key` is
/// splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15), where
/// key = splitmix64_mix(seed). Any draw is addressable without replaying the
/// stream, and `split(k)` derives an independent child key. Doubles take the
/// top 53 bits, so the sequence is reproducible in any language with 64-bit
/// unsigned wraparound arithmetic.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit constexpr CounterRng(std::uint64_t seed) noexcept
      : key_(splitmix64_mix(seed)) {}

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1).
  constexpr double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  constexpr double next_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_unit();
  }

  constexpr CounterRng split(std::uint64_t child) const noexcept {
    return CounterRng(key_ ^ splitmix64_mix(child + kGolden), Raw{});
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }
  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  struct Raw {};
  constexpr CounterRng(std::uint64_t key, Raw) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace efpi
