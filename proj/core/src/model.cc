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

#include "bitstorm/model.h"

#include <cmath>
#include <string>

#include "bitstorm/errors.h"

namespace bitstorm {

std::vector<Shape> ValidateModel(const Model& model) {
  if (model.layers.empty()) {
    throw ValidationError("model must contain at least one layer");
  }
  std::vector<Shape> shapes;
  shapes.reserve(model.layers.size());
  Shape current = model.input_shape;
  if (current.empty() || NumElements(current) == 0) {
    throw ValidationError("model input shape " + ShapeToString(current) +
                          " is invalid");
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    try {
      current = OutputShape(model.layers[i], current);
    } catch (const ValidationError& e) {
      std::string producer =
          i == 0 ? std::string("model input")
                 : "layer '" + model.layers[i - 1].name + "' (index " +
                       std::to_string(i - 1) + ")";
      throw ValidationError("layer " + std::to_string(i) + " does not accept " +
                            producer + ": " + e.what());
    }
    shapes.push_back(current);
  }
  if (shapes.back().size() != 1) {
    throw ValidationError("final layer '" + model.layers.back().name +
                          "' must produce rank-1 class scores, got " +
                          ShapeToString(shapes.back()));
  }
  return shapes;
}

Tensor Forward(const Model& model, const Tensor& input) {
  if (input.shape() != model.input_shape) {
    throw ValidationError("input shape " + ShapeToString(input.shape()) +
                          " does not match model input " +
                          ShapeToString(model.input_shape));
  }
  Tensor x = input;
  for (const LayerSpec& layer : model.layers) x = ForwardLayer(layer, x);
  return x;
}

Tensor ForwardHead(const Model& model, std::size_t last, const Tensor& input) {
  if (last >= model.layers.size()) {
    throw ValidationError("layer index " + std::to_string(last) +
                          " out of range");
  }
  if (input.shape() != model.input_shape) {
    throw ValidationError("input shape " + ShapeToString(input.shape()) +
                          " does not match model input " +
                          ShapeToString(model.input_shape));
  }
  Tensor x = input;
  for (std::size_t i = 0; i <= last; ++i) x = ForwardLayer(model.layers[i], x);
  return x;
}

Tensor ForwardTail(const Model& model, std::size_t after,
                   const Tensor& activation) {
  if (after >= model.layers.size()) {
    throw ValidationError("layer index " + std::to_string(after) +
                          " out of range");
  }
  Tensor x = activation;
  for (std::size_t i = after + 1; i < model.layers.size(); ++i) {
    x = ForwardLayer(model.layers[i], x);
  }
  return x;
}

ClassIndex Predict(const Tensor& scores) {
  if (scores.rank() != 1) {
    throw ValidationError("predict expects rank-1 scores, got " +
                          ShapeToString(scores.shape()));
  }
  ClassIndex best = kInvalidPrediction;
  float best_value = 0.0f;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const float v = scores[i];
    if (std::isnan(v)) continue;
    if (best == kInvalidPrediction || v > best_value) {
      best = static_cast<ClassIndex>(i);
      best_value = v;
    }
  }
  return best;
}

}  // namespace bitstorm
