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

#ifndef BITSTORM_TENSOR_H_
#define BITSTORM_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bitstorm {

// Tensor extents, outermost first. Image tensors are laid out as
// [height, width, channels].
using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major binary32 tensor (last axis fastest).
//
// Any bit pattern is a legal element value; injected faults routinely leave
// NaN or Inf behind and downstream layers must carry them through.
class Tensor {
 public:
  Tensor() = default;
  // Zero-filled tensor. Throws ValidationError on an empty shape or a zero
  // extent.
  explicit Tensor(Shape shape);
  // Throws ValidationError when the element count does not match the shape.
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  // Same data reinterpreted under a new shape of equal element count.
  Tensor Reshaped(Shape shape) const;

  // Bitwise equality of shape and data; NaN payloads compare by pattern.
  bool BitEquals(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

std::uint32_t FloatBits(float value);
float FloatFromBits(std::uint32_t bits);

}  // namespace bitstorm

#endif  // BITSTORM_TENSOR_H_
