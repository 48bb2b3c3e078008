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

#include "bitstorm/micro_op.h"

#include <random>

#include "bitstorm/errors.h"
#include "bitstorm/toy.h"
#include "gtest/gtest.h"

namespace bitstorm {
namespace {

TEST(MicroOpNamesTest, RoundTripElementaryKinds) {
  for (MicroOpKind k : {MicroOpKind::kAdd, MicroOpKind::kSub, MicroOpKind::kMul,
                        MicroOpKind::kReLU, MicroOpKind::kAbs,
                        MicroOpKind::kConstMul}) {
    EXPECT_EQ(ParseMicroOpKind(MicroOpKindName(k)), k);
  }
  EXPECT_THROW(ParseMicroOpKind("Layer"), ValidationError);
  EXPECT_THROW(ParseMicroOpKind("add"), ValidationError);
}

TEST(ExpandPreluTest, PreluBecomesSixOpsInDataflowOrder) {
  Model model;
  model.input_shape = {4};
  model.layers.push_back({"prelu", PreluParams{Tensor({4}, {1, 1, 1, 1})}});
  const MicroOpModel micro = ExpandPrelu(model);
  ASSERT_EQ(micro.stages.size(), 1u);
  const auto& ops = micro.stages[0].ops;
  ASSERT_EQ(ops.size(), 6u);
  EXPECT_EQ(ops[0].kind, MicroOpKind::kReLU);
  EXPECT_EQ(ops[1].kind, MicroOpKind::kAbs);
  EXPECT_EQ(ops[2].kind, MicroOpKind::kSub);
  EXPECT_EQ(ops[3].kind, MicroOpKind::kConstMul);
  EXPECT_EQ(ops[3].constant, 0.5f);
  EXPECT_EQ(ops[4].kind, MicroOpKind::kMul);
  EXPECT_EQ(ops[5].kind, MicroOpKind::kAdd);
  // The Add joins the ReLU branch (value 1) and the scaled negative branch.
  EXPECT_EQ(ops[5].operands, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(ops[2].operands, (std::vector<std::size_t>{0, 2}));
}

TEST(ExpandPreluTest, ToyPreluModelCounts) {
  const MicroOpModel micro = ExpandPrelu(MakeToyPreluCnn(1));
  // Three PReLU layers, eight opaque layers.
  EXPECT_EQ(micro.CountOps({MicroOpKind::kAdd}), 3u);
  EXPECT_EQ(micro.CountOps({MicroOpKind::kMul}), 3u);
  EXPECT_EQ(micro.CountOps({MicroOpKind::kLayer}), 8u);
  EXPECT_EQ(micro.op_count(), 3u * 6 + 8);
  EXPECT_EQ(micro.CountOps({MicroOpKind::kSub, MicroOpKind::kAbs}), 6u);
}

TEST(ExpandPreluTest, IdsAreUniqueAndDense) {
  const MicroOpModel micro = ExpandPrelu(MakeToyPreluCnn(1));
  std::size_t expected = 0;
  for (const auto& stage : micro.stages) {
    for (const auto& op : stage.ops) {
      EXPECT_EQ(op.id, expected++);
      EXPECT_EQ(op.layer, stage.layer);
    }
  }
}

TEST(ExpandPreluTest, ReluLayerIsOneOp) {
  Model model;
  model.input_shape = {3};
  model.layers.push_back({"relu", ReluParams{}});
  const MicroOpModel micro = ExpandPrelu(model);
  ASSERT_EQ(micro.op_count(), 1u);
  EXPECT_EQ(micro.stages[0].ops[0].kind, MicroOpKind::kReLU);
}

TEST(ForwardMicroOpsTest, MatchesLayerForward) {
  const Model model = MakeToyPreluCnn(2);
  const MicroOpModel micro = ExpandPrelu(model);
  const Dataset data = MakeToyDataset(2, 20);
  for (const Tensor& x : data.samples) {
    ASSERT_TRUE(ForwardMicroOps(micro, x).BitEquals(Forward(model, x)));
  }
}

TEST(ForwardMicroOpsTest, HookSeesEveryOpOnceInOrder) {
  const MicroOpModel micro = ExpandPrelu(MakeToyPreluCnn(2));
  std::vector<std::size_t> seen;
  ForwardMicroOps(micro, MakeToyDataset(2, 1).samples[0],
                  [&](const MicroOp& op, Tensor&) { seen.push_back(op.id); });
  ASSERT_EQ(seen.size(), micro.op_count());
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
}

TEST(ForwardMicroOpsTest, HookCorruptionFlowsDownstream) {
  Model model;
  model.input_shape = {2};
  model.layers.push_back({"prelu", PreluParams{Tensor({1}, {0.5f})}});
  const MicroOpModel micro = ExpandPrelu(model);
  const Tensor x({2}, {-2.0f, 3.0f});
  // Zero the Abs output: x - 0 = x, so the negative branch sees 0.5 * x.
  const Tensor y = ForwardMicroOps(micro, x, [](const MicroOp& op, Tensor& t) {
    if (op.kind == MicroOpKind::kAbs) {
      for (float& v : t.data()) v = 0.0f;
    }
  });
  EXPECT_EQ(y[0], -0.5f);           // 0 + 0.5 * (0.5 * -2)
  EXPECT_EQ(y[1], 3.0f + 0.75f);    // 3 + 0.5 * (0.5 * 3)
}

}  // namespace
}  // namespace bitstorm
