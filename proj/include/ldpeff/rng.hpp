// Copyright 2026 The ldpeff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPEFF_RNG_HPP
#define LDPEFF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace ldpeff {

// 64-bit avalanche finalizer used by SplitMix64 (Steele/Lea/Flood).
constexpr std::uint64_t fmix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Combines a base seed and a stream index into an independent stream seed.
// Replication r of a simulation uses mix64(base_seed, r), so per-replication
// results do not depend on execution order or worker-thread count.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  return fmix64(fmix64(a + kGolden) ^ fmix64(b + 2 * kGolden));
}

/**
 * SplitMix64 — splittable counter-style PRNG with 64-bit seed and state.
 *
 * Every stochastic operation in this library takes an explicit SplitMix64
 * handle; there is no global generator. Sequences are identical across
 * platforms because all samplers below are built only on integer arithmetic
 * and IEEE doubles (no std::<...>_distribution, whose output is
 * implementation-defined).
 */
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    return fmix64(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in the open interval (0, 1); safe for log transforms.
  double next_double_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Child generator with an independent stream; advances this one once.
  SplitMix64 split() noexcept { return SplitMix64(mix64(next_u64(), state_)); }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Index drawn with probability weights[i] / sum(weights). Weights must be
/// nonnegative with a positive sum.
inline std::size_t sample_categorical(std::span<const double> weights, SplitMix64& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("sample_categorical: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample_categorical: zero total weight");
  const double u = rng.next_double() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;  // u == total up to rounding
}

/// Centered Laplace draw with the given scale (mean 0, variance 2*scale^2),
/// by inverse CDF.
inline double sample_laplace(double scale, SplitMix64& rng) {
  const double v = rng.next_double_open() - 0.5;  // (-1/2, 1/2)
  const double s = (v < 0.0) ? -1.0 : 1.0;
  return -scale * s * std::log(1.0 - 2.0 * std::fabs(v));
}

}  // namespace ldpeff

#endif  // LDPEFF_RNG_HPP
