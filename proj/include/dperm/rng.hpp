// Copyright 2025 The dperm Authors
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

#ifndef DPERM_RNG_HPP_
#define DPERM_RNG_HPP_

#include <cstddef>
#include <cstdint>

namespace dperm {

// 64-bit finalizer used to derive stream keys and outputs (SplitMix64 mix).
constexpr uint64_t kGolden64 = 0x9e3779b97f4a7c15ULL;

constexpr uint64_t mix64(uint64_t z) {
  z += kGolden64;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over raw bytes; used to key noise streams off dataset contents.
uint64_t fnv1a64(const void* data, std::size_t len, uint64_t seed = 0xcbf29ce484222325ULL);

// Quantile function of the standard normal distribution (Wichura's PPND16
// rational approximations, accurate to ~1e-15). Requires p in (0, 1).
double inverse_normal_cdf(double p);

// Counter-based pseudo-random generator with named streams.
//
// The state is a (key, counter) pair; the key is derived by strong 64-bit
// mixing of (seed, stream_id), so distinct streams behave as independent
// generators while any (seed, stream_id) pair replays the same sequence.
// Single-owner: never shared across threads.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream_id)
      : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) +
                   mix64(stream_id ^ 0xbb67ae8584caa73bULL))),
        counter_(0) {}

  uint64_t next_u64() { return mix64(key_ + ++counter_ * kGolden64); }

  // Uniform draw in the open interval (0, 1); never returns 0 or 1, so it is
  // always a valid quantile argument.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal draw via the inverse-CDF transform; exactly one uniform
  // is consumed per normal, which keeps counters aligned across replays.
  double next_gaussian() { return inverse_normal_cdf(next_double()); }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_;
};

inline Rng make_rng(uint64_t seed, uint64_t stream_id) { return Rng(seed, stream_id); }

// Named stream layout. Noise streams are one-per-iteration so that traces can
// be replayed and adjacent-dataset runs can share or decouple noise by salt.
namespace streams {

constexpr uint64_t kDataShuffle = 0xD5;
constexpr uint64_t kTrainTestSplit = 0xD6;
constexpr uint64_t kReplacementPool = 0xD7;
constexpr uint64_t kSyntheticPopulation = 0xD8;
constexpr uint64_t kGeneric = 0xD9;

constexpr uint64_t kNoiseSaltDefault = 1;
constexpr uint64_t kNoiseSaltVariant = 2;

constexpr uint64_t noise_stream(uint64_t salt, int iteration) {
  return mix64(salt ^ 0x1f83d9abfb41bd6bULL) + static_cast<uint64_t>(iteration);
}

}  // namespace streams

}  // namespace dperm

#endif  // DPERM_RNG_HPP_
