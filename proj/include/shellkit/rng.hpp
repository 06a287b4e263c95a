// Copyright 2026 The Shellkit Authors.
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

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace shellkit {

namespace detail {

inline uint64_t SplitMix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t Mix(uint64_t x) {
  uint64_t s = x;
  return SplitMix64(s);
}

inline uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= uint8_t(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace detail

/// Deterministic counter-based random stream. Sub-streams are derived by
/// hashing (seed, label, index), so any (seed, label, index) triple names
/// the same sequence on every platform and in any evaluation order. All
/// distributions are implemented here rather than via <random> so that the
/// produced bytes do not depend on the standard library.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(detail::Mix(seed ^ 0x6A09E667F3BCC909ull)) {}

  /// Independent child stream; does not advance this stream.
  RngStream Sub(std::string_view label, uint64_t index) const {
    uint64_t h = state_;
    h = detail::Mix(h ^ detail::Fnv1a(label));
    h = detail::Mix(h ^ (index * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull));
    RngStream child(0);
    child.state_ = h;
    return child;
  }

  /// 64-bit seed value identifying this stream (recorded in manifests).
  uint64_t StreamId() const { return state_; }

  uint64_t NextU64() { return detail::SplitMix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double Uniform() { return double(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [lo, hi], both ends inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi) {
    uint64_t span = uint64_t(hi - lo) + 1;
    // Rejection-free modulo bias is negligible for the small spans used
    // here, but debias anyway: draw until below the largest multiple.
    uint64_t limit = ~uint64_t(0) - (~uint64_t(0) % span);
    uint64_t r;
    do {
      r = NextU64();
    } while (r >= limit);
    return lo + int64_t(r % span);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  /// Gaussian via Box-Muller; the spare value is discarded so each call
  /// consumes exactly two uniforms.
  double Normal(double mu, double sigma) {
    double u1 = Uniform(), u2 = Uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace shellkit
