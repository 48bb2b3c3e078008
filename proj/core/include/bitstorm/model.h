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

#ifndef BITSTORM_MODEL_H_
#define BITSTORM_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bitstorm/layers.h"
#include "bitstorm/tensor.h"

namespace bitstorm {

// Ordered sequential network: layer i consumes the output of layer i - 1.
struct Model {
  Shape input_shape;
  std::vector<LayerSpec> layers;
};

// Output shape of every layer. Throws ValidationError when the chain does not
// shape-check, naming the offending layer and its predecessor, when the model
// is empty, or when the last layer is not rank 1.
std::vector<Shape> ValidateModel(const Model& model);

// Full forward pass producing the class-score tensor.
Tensor Forward(const Model& model, const Tensor& input);

// Runs layers [0, last] and returns the output of layer `last`.
Tensor ForwardHead(const Model& model, std::size_t last, const Tensor& input);

// Runs layers (after, end) on the output of layer `after`.
Tensor ForwardTail(const Model& model, std::size_t after,
                   const Tensor& activation);

using ClassIndex = std::int32_t;
inline constexpr ClassIndex kInvalidPrediction = -1;

// Index of the largest score, lowest index on ties. NaN scores are skipped;
// all-NaN input yields kInvalidPrediction.
ClassIndex Predict(const Tensor& scores);

}  // namespace bitstorm

#endif  // BITSTORM_MODEL_H_
