/* Copyright 2026 The Bitstorm Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "bitstorm/rng.h"

#include <array>
#include <cstdint>
#include <set>

#include "gtest/gtest.h"

namespace bitstorm {
namespace {

using Counter = Philox4x64::Counter;
using Key = Philox4x64::Key;

// Known-answer vectors of the reference Philox4x64-10 implementation.
TEST(PhiloxTest, KnownAnswerZero) {
  const Counter out = Philox4x64::Generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Counter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL,
                          0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}));
}

TEST(PhiloxTest, KnownAnswerAllOnes) {
  const std::uint64_t ones = ~0ULL;
  const Counter out =
      Philox4x64::Generate({ones, ones, ones, ones}, {ones, ones});
  EXPECT_EQ(out, (Counter{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL,
                          0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL}));
}

TEST(PhiloxTest, KnownAnswerPi) {
  const Counter out = Philox4x64::Generate(
      {0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
       0x082efa98ec4e6c89ULL},
      {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  EXPECT_EQ(out, (Counter{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL,
                          0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL}));
}

// Cross-checked against numpy.random.Philox(counter=..., key=...).
TEST(PhiloxTest, KnownAnswerSmallWords) {
  const Counter out = Philox4x64::Generate({5, 11, 13, 0}, {42, 7});
  EXPECT_EQ(out, (Counter{0x77b9fa1bf580dc6fULL, 0xb69c600b72496fdcULL,
                          0x4d0a45ea9caa5c92ULL, 0x045f12bfdf75cfb6ULL}));
}

TEST(RngStreamTest, WordsFollowCounterBlocks) {
  RngStream rng(42, 7, 11, 13);
  const Counter b0 = Philox4x64::Generate({0, 11, 13, 0}, {42, 7});
  const Counter b1 = Philox4x64::Generate({1, 11, 13, 0}, {42, 7});
  for (std::uint64_t w : b0) EXPECT_EQ(rng.NextU64(), w);
  for (std::uint64_t w : b1) EXPECT_EQ(rng.NextU64(), w);
  EXPECT_EQ(rng.draws(), 8u);
}

TEST(RngStreamTest, SameTupleSameStream) {
  RngStream a(1, 2, 3, 4), b(1, 2, 3, 4);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngStreamTest, DistinctTuplesDiffer) {
  const std::array<std::array<std::uint64_t, 4>, 5> tuples = {{
      {1, 2, 3, 4}, {0, 2, 3, 4}, {1, 0, 3, 4}, {1, 2, 0, 4}, {1, 2, 3, 0}}};
  std::set<std::uint64_t> first_words;
  for (const auto& t : tuples) {
    first_words.insert(RngStream(t[0], t[1], t[2], t[3]).NextU64());
  }
  EXPECT_EQ(first_words.size(), tuples.size());
}

TEST(RngStreamTest, DeriveStreamMatchesConstructor) {
  RngStream a = DeriveStream(9, 8, 7, 6);
  RngStream b(9, 8, 7, 6);
  EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngStreamTest, UnitIntervalBounds) {
  RngStream rng(3, 0, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.NextUnit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStreamTest, UniformBelowBoundsAndCoverage) {
  RngStream rng(3, 1, 0, 0);
  std::array<int, 7> hits{};
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t v = rng.UniformBelow(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(RngStreamTest, UniformBelowIsMultiplyHigh) {
  RngStream a(5, 5, 5, 5), b(5, 5, 5, 5);
  const std::uint64_t word = a.NextU64();
  const auto expected = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(word) * 1000) >> 64);
  EXPECT_EQ(b.UniformBelow(1000), expected);
}

TEST(RngStreamTest, BernoulliExtremes) {
  RngStream rng(4, 0, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_FALSE(rng.Bernoulli(0.0));
    ASSERT_TRUE(rng.Bernoulli(1.0));
  }
  EXPECT_EQ(rng.draws(), 2000u);
}

}  // namespace
}  // namespace bitstorm
