// Copyright 2026 The blindspot authors
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

#ifndef BLINDSPOT_RNG_HPP
#define BLINDSPOT_RNG_HPP

#include <cstdint>
#include <cstddef>

namespace blindspot {

/// SplitMix64 (Steele, Lea & Flood; the generator behind java.util.SplittableRandom).
///
/// Every random draw in this library flows through this engine so that results
/// are reproducible bit-for-bit across platforms from a 64-bit seed alone.
/// Substreams are derived by seed-splitting: stream k of seed s starts from
/// mix64(s + (k + 1) * GAMMA), which is statistically independent of stream j
/// for j != k.  Doubles use the top 53 bits, uniform on [0, 1).
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Stream k of a base seed; streams are mutually independent.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix64(seed + (stream + 1) * kGamma));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, bound); bound must be positive.
  /// Multiply-shift reduction (bias < bound / 2^64, negligible here).
  std::size_t next_index(std::size_t bound) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace blindspot

#endif  // BLINDSPOT_RNG_HPP
