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

#include "bitstorm/fault.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bitstorm/errors.h"
#include "gtest/gtest.h"
#include "stats_util.h"

namespace bitstorm {
namespace {

using testing_util::ChiSquareUniform;

TEST(FlipBitTest, SignBitNegates) {
  EXPECT_EQ(FlipBit(1.5f, 31), -1.5f);
  EXPECT_EQ(FloatBits(FlipBit(0.0f, 31)), 0x80000000u);
}

TEST(FlipBitTest, ExponentLowBitHalvesOne) {
  // 1.0 = 0x3f800000; bit 23 is the exponent LSB.
  EXPECT_EQ(FlipBit(1.0f, 23), 0.5f);
}

TEST(FlipBitTest, ZeroBecomesTwoAtBit30) {
  EXPECT_EQ(FlipBit(0.0f, 30), 2.0f);
}

TEST(FlipBitTest, OneBecomesInfinityAtBit30) {
  // 0x3f800000 ^ 0x40000000 = 0x7f800000.
  EXPECT_EQ(FlipBit(1.0f, 30), std::numeric_limits<float>::infinity());
}

TEST(FlipBitTest, MantissaLsbIsOneUlp) {
  EXPECT_EQ(FlipBit(1.0f, 0), std::nextafter(1.0f, 2.0f));
}

TEST(FlipBitTest, InvolutionOnEveryBitOfSpecialValues) {
  const float values[] = {0.0f,
                          -0.0f,
                          1.0f,
                          -3.25f,
                          std::numeric_limits<float>::infinity(),
                          std::numeric_limits<float>::denorm_min(),
                          std::numeric_limits<float>::max(),
                          std::numeric_limits<float>::quiet_NaN()};
  for (float v : values) {
    for (int bit = 0; bit < 32; ++bit) {
      EXPECT_EQ(FloatBits(FlipBit(FlipBit(v, bit), bit)), FloatBits(v))
          << "bit " << bit;
      EXPECT_EQ(FloatBits(FlipBit(v, bit)) ^ FloatBits(v), 1u << bit);
    }
  }
}

TEST(FaultNamesTest, RoundTrip) {
  for (FaultKind k : {FaultKind::kZero, FaultKind::kRandomValue,
                      FaultKind::kBitFlipRandom, FaultKind::kBitFlipSpecific}) {
    EXPECT_EQ(ParseFaultKind(FaultKindName(k)), k);
  }
  EXPECT_EQ(ParseInjectionMode("op"), InjectionMode::kOperationWise);
  EXPECT_EQ(ParseInjectionMode("layer"), InjectionMode::kLayerWise);
  EXPECT_THROW(ParseFaultKind("stuck_at"), ValidationError);
  EXPECT_THROW(ParseInjectionMode("tensor"), ValidationError);
}

TEST(ValidateFaultSpecTest, RejectsBadFields) {
  FaultSpec spec;
  spec.probability = 1.5;
  EXPECT_THROW(ValidateFaultSpec(spec), ValidationError);
  spec.probability = std::nan("");
  EXPECT_THROW(ValidateFaultSpec(spec), ValidationError);
  spec.probability = 0.5;
  spec.kind = FaultKind::kBitFlipSpecific;
  spec.bit = 32;
  EXPECT_THROW(ValidateFaultSpec(spec), ValidationError);
  spec.bit = 31;
  EXPECT_NO_THROW(ValidateFaultSpec(spec));
  spec.layer = 12;
  EXPECT_THROW(ValidateFaultSpec(spec, 12), ValidationError);
  spec.mode = InjectionMode::kOperationWise;
  EXPECT_THROW(ValidateFaultSpec(spec), ValidationError);
  spec.op_targets = {MicroOpKind::kLayer};
  EXPECT_THROW(ValidateFaultSpec(spec), ValidationError);
  spec.op_targets = {MicroOpKind::kAdd};
  EXPECT_NO_THROW(ValidateFaultSpec(spec));
}

TEST(FaultSpecDigestTest, SensitiveToEveryField) {
  FaultSpec a;
  FaultSpec b = a;
  EXPECT_EQ(FaultSpecDigest(a), FaultSpecDigest(b));
  b.probability = 0.25;
  EXPECT_NE(FaultSpecDigest(a), FaultSpecDigest(b));
  b = a;
  b.seed = 1;
  EXPECT_NE(FaultSpecDigest(a), FaultSpecDigest(b));
  b = a;
  b.layer = 3;
  EXPECT_NE(FaultSpecDigest(a), FaultSpecDigest(b));
}

TEST(CorruptElementTest, ZeroClearsAllBits) {
  Tensor t({3}, {1.0f, -2.0f, 3.0f});
  RngStream rng(0, 0, 0, 0);
  const InjectionRecord r = CorruptElement(t, 1, FaultKind::kZero, kNoBit, rng);
  EXPECT_EQ(FloatBits(t[1]), 0u);
  EXPECT_EQ(r.element, 1u);
  EXPECT_EQ(r.original_bits, FloatBits(-2.0f));
  EXPECT_EQ(r.corrupted_bits, 0u);
  EXPECT_EQ(r.bit, kNoBit);
  EXPECT_EQ(rng.draws(), 1u);
}

TEST(CorruptElementTest, RandomValueUsesHighPayloadBits) {
  Tensor t({1}, {1.0f});
  RngStream rng(1, 2, 3, 4), probe(1, 2, 3, 4);
  CorruptElement(t, 0, FaultKind::kRandomValue, kNoBit, rng);
  EXPECT_EQ(FloatBits(t[0]), static_cast<std::uint32_t>(probe.NextU64() >> 32));
}

TEST(CorruptElementTest, RandomBitFlipRecordsTheBit) {
  Tensor t({1}, {1.0f});
  RngStream rng(1, 2, 3, 4), probe(1, 2, 3, 4);
  const InjectionRecord r =
      CorruptElement(t, 0, FaultKind::kBitFlipRandom, kNoBit, rng);
  const int expected = static_cast<int>(
      (static_cast<unsigned __int128>(probe.NextU64()) * 32) >> 64);
  EXPECT_EQ(r.bit, expected);
  EXPECT_EQ(r.corrupted_bits ^ r.original_bits, 1u << expected);
  EXPECT_TRUE(r.changed());
}

TEST(CorruptElementTest, SpecificBitStillConsumesOneDraw) {
  Tensor t({1}, {0.0f});
  RngStream rng(0, 0, 0, 0);
  const InjectionRecord r =
      CorruptElement(t, 0, FaultKind::kBitFlipSpecific, 30, rng);
  EXPECT_EQ(t[0], 2.0f);
  EXPECT_EQ(r.bit, 30);
  EXPECT_EQ(rng.draws(), 1u);
}

TEST(CorruptElementTest, ZeroOnZeroIsRecordedButUnchanged) {
  Tensor t({1}, {0.0f});
  RngStream rng(0, 0, 0, 0);
  EXPECT_FALSE(CorruptElement(t, 0, FaultKind::kZero, kNoBit, rng).changed());
}

TEST(CorruptElementTest, IndexOutOfRange) {
  Tensor t({2});
  RngStream rng(0, 0, 0, 0);
  EXPECT_THROW(CorruptElement(t, 2, FaultKind::kZero, kNoBit, rng),
               ValidationError);
}

TEST(MaybeInjectTest, ConsumesFixedDrawsEitherWay) {
  Tensor t({10});
  FaultSpec never;
  never.probability = 0.0;
  FaultSpec always;
  always.probability = 1.0;
  RngStream a(0, 0, 0, 0), b(0, 0, 0, 0);
  EXPECT_FALSE(MaybeInject(t, never, a).has_value());
  EXPECT_TRUE(MaybeInject(t, always, b).has_value());
  EXPECT_EQ(a.draws(), kDrawsPerInjectionCall);
  EXPECT_EQ(b.draws(), kDrawsPerInjectionCall);
  // Both streams are now aligned on the same word.
  EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(MaybeInjectTest, ZeroProbabilityLeavesTensorUntouched) {
  Tensor t({4}, {1, 2, 3, 4});
  const Tensor before = t;
  FaultSpec spec;
  spec.probability = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    RngStream rng(0, 0, s, 0);
    ASSERT_FALSE(MaybeInject(t, spec, rng).has_value());
  }
  EXPECT_TRUE(t.BitEquals(before));
}

TEST(MaybeInjectTest, ElementSelectionIsUniform) {
  constexpr std::size_t kElements = 1000;
  constexpr std::uint64_t kCalls = 100000;
  Tensor t({kElements});
  FaultSpec spec;
  spec.kind = FaultKind::kZero;
  std::vector<std::uint64_t> counts(kElements);
  for (std::uint64_t s = 0; s < kCalls; ++s) {
    RngStream rng(11, 0, s, 0);
    ++counts[MaybeInject(t, spec, rng)->element];
  }
  EXPECT_LT(ChiSquareUniform(counts), testing_util::kChiSquare999Df999);
}

TEST(MaybeInjectTest, BitSelectionIsUniform) {
  Tensor t({8});
  FaultSpec spec;
  std::vector<std::uint64_t> counts(32);
  for (std::uint64_t s = 0; s < 32000; ++s) {
    RngStream rng(12, 0, s, 0);
    ++counts[MaybeInject(t, spec, rng)->bit];
  }
  EXPECT_LT(ChiSquareUniform(counts), testing_util::kChiSquare999Df31);
}

TEST(RecordsCsvTest, Format) {
  std::ostringstream out;
  WriteRecordsCsvHeader(out);
  const InjectionRecord r{1, 2, 3, 4, 30, 0x00000000u, 0x40000000u};
  WriteRecordsCsv(out, std::span(&r, 1));
  EXPECT_EQ(out.str(),
            "trial,sample,site,element,bit,original_hex,corrupted_hex\n"
            "1,2,3,4,30,0x00000000,0x40000000\n");
}

}  // namespace
}  // namespace bitstorm
