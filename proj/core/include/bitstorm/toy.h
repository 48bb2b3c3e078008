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

#ifndef BITSTORM_TOY_H_
#define BITSTORM_TOY_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bitstorm/dataset.h"
#include "bitstorm/model.h"

namespace bitstorm {

// Seeded desk-scale stand-ins for trained classifiers. Every value is drawn
// from Philox streams and rounded with IEEE arithmetic only, so the output is
// identical on every platform.

inline constexpr std::size_t kToySamples = 1000;
inline constexpr std::uint32_t kToyClasses = 10;

// [16, 16, 3] input images.
Shape ToyInputShape();

// One random image per class; samples scatter around these.
std::vector<Tensor> ToyPrototypes(std::uint64_t seed, std::uint32_t classes);

// Sample i belongs to class i % classes and is its prototype plus uniform
// noise.
Dataset MakeToyDataset(std::uint64_t seed, std::size_t samples = kToySamples,
                       std::uint32_t classes = kToyClasses);

// Twelve layers: conv, conv, maxpool, dropout, conv, conv, maxpool, dropout,
// flatten, dense, dropout, dense+softmax. ReLU is fused into the hidden conv
// and dense layers. The output layer is a nearest-prototype classifier over
// the penultimate features, so the golden run beats chance.
Model MakeToyCnn(std::uint64_t seed, std::uint32_t classes = kToyClasses);

// The same silhouette with linear conv/dense layers each followed by a
// separate PReLU layer, for operation-wise experiments.
Model MakeToyPreluCnn(std::uint64_t seed, std::uint32_t classes = kToyClasses);

}  // namespace bitstorm

#endif  // BITSTORM_TOY_H_
