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

#include "bitstorm/tensor.h"

#include <cmath>
#include <limits>

#include "bitstorm/errors.h"
#include "gtest/gtest.h"

namespace bitstorm {
namespace {

TEST(ShapeTest, NumElementsAndText) {
  EXPECT_EQ(NumElements({8, 8, 8}), 512u);
  EXPECT_EQ(NumElements({10}), 10u);
  EXPECT_EQ(ShapeToString({16, 16, 3}), "[16,16,3]");
}

TEST(TensorTest, ZeroFilled) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  for (float v : t.data()) EXPECT_EQ(FloatBits(v), 0u);
}

TEST(TensorTest, RejectsBadShapes) {
  EXPECT_THROW(Tensor(Shape{}), ValidationError);
  EXPECT_THROW(Tensor({2, 0}), ValidationError);
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ValidationError);
}

TEST(TensorTest, ReshapeKeepsData) {
  Tensor t({2, 2}, {1, 2, 3, 4});
  Tensor r = t.Reshaped({4});
  EXPECT_EQ(r.shape(), Shape({4}));
  EXPECT_EQ(r[3], 4.0f);
  EXPECT_THROW(t.Reshaped({3}), ValidationError);
}

TEST(TensorTest, BitEqualsComparesPatterns) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  Tensor a({2}, {nan, 0.0f});
  Tensor b({2}, {nan, 0.0f});
  Tensor c({2}, {nan, -0.0f});
  EXPECT_TRUE(a.BitEquals(b));
  EXPECT_FALSE(a.BitEquals(c));
  EXPECT_FALSE(a.BitEquals(a.Reshaped({2, 1})));
}

TEST(FloatBitsTest, RoundTrip) {
  EXPECT_EQ(FloatBits(1.0f), 0x3f800000u);
  EXPECT_EQ(FloatFromBits(0x40000000u), 2.0f);
  EXPECT_EQ(FloatBits(FloatFromBits(0x7fc00001u)), 0x7fc00001u);
}

}  // namespace
}  // namespace bitstorm
