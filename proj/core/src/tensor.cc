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

#include <bit>
#include <cstring>
#include <functional>
#include <numeric>
#include <utility>

#include "bitstorm/errors.h"

namespace bitstorm {
namespace {

void CheckShape(const Shape& shape) {
  if (shape.empty()) throw ValidationError("tensor shape must not be empty");
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw ValidationError("tensor extent must be positive, got " +
                            ShapeToString(shape));
    }
  }
}

}  // namespace

std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeToString(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  CheckShape(shape_);
  data_.assign(NumElements(shape_), 0.0f);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  CheckShape(shape_);
  if (NumElements(shape_) != data_.size()) {
    throw ValidationError("tensor of shape " + ShapeToString(shape_) +
                          " needs " + std::to_string(NumElements(shape_)) +
                          " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

bool Tensor::BitEquals(const Tensor& other) const {
  return shape_ == other.shape_ && data_.size() == other.data_.size() &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(),
                      data_.size() * sizeof(float)) == 0);
}

std::uint32_t FloatBits(float value) {
  return std::bit_cast<std::uint32_t>(value);
}

float FloatFromBits(std::uint32_t bits) { return std::bit_cast<float>(bits); }

}  // namespace bitstorm
