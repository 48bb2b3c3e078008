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

#ifndef BITSTORM_DATASET_H_
#define BITSTORM_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "bitstorm/tensor.h"

namespace bitstorm {

// Pre-tensorized evaluation set. `labels` is empty for an unlabeled set.
struct Dataset {
  std::vector<Tensor> samples;
  std::vector<std::uint32_t> labels;
  std::uint32_t class_count = 0;

  bool labeled() const { return !labels.empty(); }
  std::size_t size() const { return samples.size(); }
  const Shape& sample_shape() const { return samples.front().shape(); }
};

// Throws ValidationError for an empty set, mixed sample shapes, a label count
// that differs from the sample count, or a label >= class_count.
void ValidateDataset(const Dataset& dataset);

inline constexpr char kSamplesFile[] = "samples.bin";
inline constexpr char kLabelsFile[] = "labels.bin";

// Reads `dir`/samples.bin and, when present, `dir`/labels.bin.
//
// samples.bin: "BSDS", u32 version (1), u32 count, u32 rank, u32 extents...,
// then count * prod(extents) little-endian binary32 values.
// labels.bin:  "BSLB", u32 count, then count little-endian u32 labels.
//
// Neither file records the class count. Pass it explicitly (usually the
// model's output width); otherwise it is max(label) + 1.
Dataset LoadDataset(const std::filesystem::path& dir,
                    std::optional<std::uint32_t> class_count = std::nullopt);

void SaveDataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace bitstorm

#endif  // BITSTORM_DATASET_H_
