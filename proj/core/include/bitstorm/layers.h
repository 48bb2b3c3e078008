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

#ifndef BITSTORM_LAYERS_H_
#define BITSTORM_LAYERS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bitstorm/tensor.h"

namespace bitstorm {

enum class LayerKind {
  kConv2D,
  kMaxPool2D,
  kDense,
  kReLU,
  kPReLU,
  kSoftmax,
  kFlatten,
  kDropout,
};

enum class Padding { kValid, kSame };

// Activation fused into a Conv2D or Dense layer. A fused activation is part
// of the layer's output, so layer-wise injection lands after it.
enum class Activation { kLinear, kReLU, kSoftmax };

std::string_view LayerKindName(LayerKind kind);
// Throws ValidationError for unknown names.
LayerKind ParseLayerKind(std::string_view name);
std::string_view PaddingName(Padding padding);
Padding ParsePadding(std::string_view name);
std::string_view ActivationName(Activation activation);
Activation ParseActivation(std::string_view name);

struct Conv2DParams {
  Tensor kernel;  // [kh, kw, cin, cout]
  std::vector<float> bias;  // [cout]
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  Padding padding = Padding::kValid;
  Activation activation = Activation::kLinear;
};

struct MaxPool2DParams {
  std::size_t pool_h = 2;
  std::size_t pool_w = 2;
  std::size_t stride_h = 2;
  std::size_t stride_w = 2;
};

struct DenseParams {
  Tensor weights;  // [in, out]
  std::vector<float> bias;  // [out]
  Activation activation = Activation::kLinear;
};

struct ReluParams {};

struct PreluParams {
  Tensor alpha;  // broadcastable to the layer input, trailing-aligned
};

struct SoftmaxParams {};
struct FlattenParams {};

struct DropoutParams {
  double rate = 0.0;  // recorded only; inference is a pass-through
};

using LayerParams =
    std::variant<Conv2DParams, MaxPool2DParams, DenseParams, ReluParams,
                 PreluParams, SoftmaxParams, FlattenParams, DropoutParams>;

struct LayerSpec {
  std::string name;
  LayerParams params;

  LayerKind kind() const;
};

// Shape produced by `layer` for an input of shape `input`. Throws
// ValidationError naming the layer when the input does not fit.
Shape OutputShape(const LayerSpec& layer, const Shape& input);

// Runs one layer. Deterministic: identical input and weights give a
// bit-identical output.
Tensor ForwardLayer(const LayerSpec& layer, const Tensor& input);

Tensor Conv2D(const Conv2DParams& params, const Tensor& input);
Tensor MaxPool2D(const MaxPool2DParams& params, const Tensor& input);
Tensor Dense(const DenseParams& params, const Tensor& input);
Tensor Relu(const Tensor& input);
// relu(x) + alpha * (0.5 * (x - |x|)), evaluated through the same
// elementwise steps the micro-op expansion exposes.
Tensor Prelu(const Tensor& input, const Tensor& alpha);
Tensor Softmax(const Tensor& input);
Tensor Flatten(const Tensor& input);
Tensor DropoutInference(const Tensor& input);

// Elementwise building blocks shared by Prelu and the micro-op evaluator.
Tensor Abs(const Tensor& input);
Tensor Add(const Tensor& lhs, const Tensor& rhs);
Tensor Sub(const Tensor& lhs, const Tensor& rhs);
// `rhs` may broadcast against `lhs` (trailing-aligned, extents 1 or equal).
Tensor Mul(const Tensor& lhs, const Tensor& rhs);
Tensor ConstMul(const Tensor& input, float constant);

// True when `from` broadcasts to `to` under trailing alignment.
bool Broadcastable(const Shape& from, const Shape& to);

}  // namespace bitstorm

#endif  // BITSTORM_LAYERS_H_
