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

#include "dperm/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace dperm {
namespace {

std::vector<uint64_t> draw(uint64_t seed, uint64_t stream, int count) {
  Rng rng(seed, stream);
  std::vector<uint64_t> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(rng.next_u64());
  return out;
}

TEST(Rng, SameSeedSameStreamReplays) {
  EXPECT_EQ(draw(42, 0, 100), draw(42, 0, 100));
}

TEST(Rng, DistinctStreamsDiffer) {
  const auto a = draw(42, 0, 100);
  const auto b = draw(42, 1, 100);
  EXPECT_NE(a, b);
}

TEST(Rng, DistinctSeedsDiffer) {
  const auto a = draw(42, 0, 100);
  const auto b = draw(43, 0, 100);
  EXPECT_NE(a, b);
}

// First outputs frozen so the stream derivation can never drift silently; a
// change here would invalidate every recorded trace.
TEST(Rng, GoldenFirstDraws) {
  EXPECT_EQ(draw(42, 0, 1)[0], 4546224940621026837ULL);
  EXPECT_EQ(draw(43, 0, 1)[0], 12674648150646730542ULL);
  EXPECT_EQ(draw(42, 1, 1)[0], 2473533952494356327ULL);
  Rng rng(42, 0);
  EXPECT_DOUBLE_EQ(rng.next_double(), 0.24645134786145501);
}

TEST(Rng, UniformsAreInOpenUnitInterval) {
  Rng rng(7, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_double();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(InverseNormalCdf, MatchesReferenceQuantiles) {
  EXPECT_NEAR(inverse_normal_cdf(0.5), 0.0, 1e-16);
  EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(inverse_normal_cdf(0.01), -2.3263478740408408, 1e-12);
  EXPECT_NEAR(inverse_normal_cdf(1e-10), -6.361340902404056, 1e-9);
  EXPECT_NEAR(inverse_normal_cdf(1e-15), -7.941345326170998, 1e-9);
}

TEST(InverseNormalCdf, IsOddAroundHalf) {
  for (const double p : {0.51, 0.7, 0.9, 0.999, 1.0 - 1e-9}) {
    EXPECT_NEAR(inverse_normal_cdf(p), -inverse_normal_cdf(1.0 - p), 1e-11);
  }
}

TEST(InverseNormalCdf, RejectsBoundaries) {
  EXPECT_THROW(inverse_normal_cdf(0.0), std::domain_error);
  EXPECT_THROW(inverse_normal_cdf(1.0), std::domain_error);
  EXPECT_THROW(inverse_normal_cdf(-0.1), std::domain_error);
}

TEST(Streams, NoiseStreamsDistinctAcrossIterationsAndSalts) {
  EXPECT_NE(streams::noise_stream(1, 0), streams::noise_stream(1, 1));
  EXPECT_NE(streams::noise_stream(1, 0), streams::noise_stream(2, 0));
}

TEST(Fnv1a, DependsOnEveryByte) {
  const char a[] = "abc";
  const char b[] = "abd";
  EXPECT_NE(fnv1a64(a, 3), fnv1a64(b, 3));
  EXPECT_EQ(fnv1a64(a, 3), fnv1a64(a, 3));
}

}  // namespace
}  // namespace dperm
