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

#include <array>
#include <string>
#include <utility>
#include <variant>

#include "bitstorm/errors.h"
#include "bitstorm/layers.h"

namespace bitstorm {
namespace {

constexpr std::array<std::string_view, 7> kMicroOpNames = {
    "Add", "Sub", "Mul", "ReLU", "Abs", "ConstMul", "Layer"};

Tensor EvaluateOp(const MicroOp& op, const LayerSpec& layer,
                  const std::vector<Tensor>& values) {
  const auto& args = op.operands;
  switch (op.kind) {
    case MicroOpKind::kAdd:
      return Add(values[args[0]], values[args[1]]);
    case MicroOpKind::kSub:
      return Sub(values[args[0]], values[args[1]]);
    case MicroOpKind::kMul:
      return Mul(values[args[0]], std::get<PreluParams>(layer.params).alpha);
    case MicroOpKind::kReLU:
      return Relu(values[args[0]]);
    case MicroOpKind::kAbs:
      return Abs(values[args[0]]);
    case MicroOpKind::kConstMul:
      return ConstMul(values[args[0]], op.constant);
    case MicroOpKind::kLayer:
      return ForwardLayer(layer, values[args[0]]);
  }
  throw std::logic_error("unhandled micro-op kind");
}

}  // namespace

std::string_view MicroOpKindName(MicroOpKind kind) {
  return kMicroOpNames[static_cast<std::size_t>(kind)];
}

MicroOpKind ParseMicroOpKind(std::string_view name) {
  for (std::size_t i = 0; i + 1 < kMicroOpNames.size(); ++i) {
    if (kMicroOpNames[i] == name) return static_cast<MicroOpKind>(i);
  }
  throw ValidationError("unknown operation kind '" + std::string(name) +
                        "' (expected Add, Sub, Mul, ReLU, Abs or ConstMul)");
}

std::size_t MicroOpModel::op_count() const {
  std::size_t n = 0;
  for (const auto& stage : stages) n += stage.ops.size();
  return n;
}

std::size_t MicroOpModel::CountOps(const MicroOpKindSet& kinds) const {
  std::size_t n = 0;
  for (const auto& stage : stages) {
    for (const auto& op : stage.ops) n += kinds.contains(op.kind) ? 1 : 0;
  }
  return n;
}

MicroOpModel ExpandPrelu(const Model& model) {
  ValidateModel(model);
  MicroOpModel micro{model, {}};
  std::size_t next_id = 0;
  auto op = [&](MicroOpKind kind, std::size_t layer,
                std::vector<std::size_t> operands, float constant = 0.0f) {
    return MicroOp{kind, next_id++, layer, std::move(operands), constant};
  };
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    MicroOpStage stage{i, {}};
    switch (model.layers[i].kind()) {
      case LayerKind::kPReLU:
        // v1 = relu(x), v2 = |x|, v3 = x - v2, v4 = 0.5 * v3,
        // v5 = alpha * v4, v6 = v1 + v5
        stage.ops.push_back(op(MicroOpKind::kReLU, i, {0}));
        stage.ops.push_back(op(MicroOpKind::kAbs, i, {0}));
        stage.ops.push_back(op(MicroOpKind::kSub, i, {0, 2}));
        stage.ops.push_back(op(MicroOpKind::kConstMul, i, {3}, 0.5f));
        stage.ops.push_back(op(MicroOpKind::kMul, i, {4}));
        stage.ops.push_back(op(MicroOpKind::kAdd, i, {1, 5}));
        break;
      case LayerKind::kReLU:
        stage.ops.push_back(op(MicroOpKind::kReLU, i, {0}));
        break;
      default:
        stage.ops.push_back(op(MicroOpKind::kLayer, i, {0}));
        break;
    }
    micro.stages.push_back(std::move(stage));
  }
  return micro;
}

Tensor ForwardMicroOps(const MicroOpModel& micro, const Tensor& input,
                       const MicroOpHook& hook) {
  if (input.shape() != micro.model.input_shape) {
    throw ValidationError("input shape " + ShapeToString(input.shape()) +
                          " does not match model input " +
                          ShapeToString(micro.model.input_shape));
  }
  Tensor x = input;
  std::vector<Tensor> values;
  for (const MicroOpStage& stage : micro.stages) {
    const LayerSpec& layer = micro.model.layers[stage.layer];
    values.clear();
    values.push_back(std::move(x));
    for (const MicroOp& op : stage.ops) {
      Tensor out = EvaluateOp(op, layer, values);
      if (hook) hook(op, out);
      values.push_back(std::move(out));
    }
    x = std::move(values.back());
  }
  return x;
}

}  // namespace bitstorm
