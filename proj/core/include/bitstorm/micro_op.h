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

#ifndef BITSTORM_MICRO_OP_H_
#define BITSTORM_MICRO_OP_H_

#include <cstddef>
#include <functional>
#include <set>
#include <string_view>
#include <vector>

#include "bitstorm/model.h"
#include "bitstorm/tensor.h"

namespace bitstorm {

// Elementary operation kinds. kLayer is an opaque whole layer and can never
// be an injection target.
enum class MicroOpKind { kAdd, kSub, kMul, kReLU, kAbs, kConstMul, kLayer };

std::string_view MicroOpKindName(MicroOpKind kind);
// Accepts the six elementary kinds ("Add", "Sub", "Mul", "ReLU", "Abs",
// "ConstMul"). Throws ValidationError otherwise.
MicroOpKind ParseMicroOpKind(std::string_view name);

using MicroOpKindSet = std::set<MicroOpKind>;

// One node of a layer-local dataflow. Values are numbered per stage: value 0
// is the stage input and op k of the stage writes value k + 1.
struct MicroOp {
  MicroOpKind kind;
  std::size_t id = 0;     // unique across the model; the injection site id
  std::size_t layer = 0;  // index of the layer this op belongs to
  std::vector<std::size_t> operands;
  float constant = 0.0f;  // kConstMul only
};

struct MicroOpStage {
  std::size_t layer = 0;
  std::vector<MicroOp> ops;  // the last op produces the stage output
};

struct MicroOpModel {
  Model model;
  std::vector<MicroOpStage> stages;

  std::size_t op_count() const;
  // Executions of ops whose kind is in `kinds` during one inference.
  std::size_t CountOps(const MicroOpKindSet& kinds) const;
};

// Replaces each PReLU layer with its branch dataflow
//   relu(x) + alpha * (0.5 * (x - |x|))
// as ReLU, Abs, Sub, ConstMul(0.5), Mul(alpha), Add with the Add combining
// the two branches last. ReLU layers map to one ReLU op; every other layer
// becomes a single opaque kLayer op.
MicroOpModel ExpandPrelu(const Model& model);

// Called after each op with its freshly computed output, which the hook may
// corrupt in place before downstream ops read it.
using MicroOpHook = std::function<void(const MicroOp&, Tensor&)>;

Tensor ForwardMicroOps(const MicroOpModel& micro, const Tensor& input,
                       const MicroOpHook& hook = {});

}  // namespace bitstorm

#endif  // BITSTORM_MICRO_OP_H_
