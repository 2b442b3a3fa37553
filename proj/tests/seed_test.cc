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


#include "recrisk/seed.h"

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace recrisk {
namespace {

TEST(Mix64Test, MatchesSplitMix64ReferenceOutput) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(Mix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(Mix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(HashStringTest, MatchesFnv1aVectors) {
  EXPECT_EQ(HashString(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(HashString("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(HashString("foobar"), 0x85944171f73967e8ULL);
}

TEST(ParseHex64Test, AcceptsOnlyHexDigits) {
  uint64_t v = 0;
  EXPECT_TRUE(ParseHex64("a29f4a869b32042c", &v));
  EXPECT_EQ(v, 0xa29f4a869b32042cULL);
  EXPECT_FALSE(ParseHex64("", &v));
  EXPECT_FALSE(ParseHex64("12g", &v));
  EXPECT_FALSE(ParseHex64("11112222333344445", &v));
}

TEST(DeriveSeedTest, FollowsDocumentedFormula) {
  const Seed parent{12345};
  const uint64_t expected =
      Mix64(Mix64(12345 ^ HashString("run")) + Mix64(7 + 0x9e3779b97f4a7c15ULL));
  EXPECT_EQ(DeriveSeed(parent, "run", 7).value, expected);
}

TEST(DeriveSeedTest, DistinctTagsAndIndicesGiveDistinctSeeds) {
  std::set<uint64_t> seen;
  for (const char* tag : {"run", "data", "fit", "bits"}) {
    for (uint64_t i = 0; i < 1000; ++i) {
      seen.insert(DeriveSeed(Seed{1}, tag, i).value);
    }
  }
  EXPECT_EQ(seen.size(), 4000u);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(Seed{99}), b(Seed{99});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformDoubleInUnitInterval) {
  Rng rng(Seed{3});
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.UniformDouble();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of 1e5 uniforms: standard error ~ 0.0009.
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(RngTest, UniformIntCoversRangeEvenly) {
  Rng rng(Seed{4});
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const uint64_t v = rng.UniformInt(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (const int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(RngTest, LaplaceHasZeroMeanAndExpectedAbsoluteDeviation) {
  Rng rng(Seed{5});
  double sum = 0.0, abs_sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Laplace(2.0);
    sum += x;
    abs_sum += std::fabs(x);
  }
  // E|X| = scale for Laplace(0, scale).
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(abs_sum / n, 2.0, 0.05);
}

TEST(RngTest, CategoricalFollowsWeights) {
  Rng rng(Seed{6});
  const std::vector<double> w = {1.0, 0.0, 3.0};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 40000; ++i) ++counts[rng.Categorical(w)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0], 10000, 400);
}

TEST(RngTest, ShuffleIsAPermutation) {
  Rng rng(Seed{8});
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.Shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

}  // namespace
}  // namespace recrisk
