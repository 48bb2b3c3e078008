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

#ifndef BITSTORM_ACTIVATION_CACHE_H_
#define BITSTORM_ACTIVATION_CACHE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bitstorm/dataset.h"
#include "bitstorm/model.h"
#include "bitstorm/tensor.h"

namespace bitstorm {

// Per-sample outputs of one layer for a whole dataset, stored on disk as
// `cache_manifest.json` plus `chunk_<k>.bin` files of raw little-endian
// binary32 activations, sample-major.
//
// The writer holds at most one chunk in memory; the chunk size is the largest
// whole number of samples that fits the byte budget. Readers never modify
// the files, so one cache can serve concurrent trials.
class ActivationCache {
 public:
  struct Chunk {
    std::string file;
    std::size_t first_sample = 0;
    std::size_t count = 0;
  };

  // Runs the head of `model` through `layer` for every sample. Throws
  // ResourceError when `budget_bytes` cannot hold one activation or the disk
  // lacks space, ValidationError on shape problems.
  static ActivationCache Build(const Model& model, const Dataset& dataset,
                               std::size_t layer, std::uint64_t budget_bytes,
                               const std::filesystem::path& dir);

  // Throws ValidationError when the directory holds no valid cache.
  static ActivationCache Open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::size_t layer() const { return layer_; }
  const Shape& shape() const { return shape_; }
  std::size_t sample_count() const { return sample_count_; }
  std::size_t sample_bytes() const { return NumElements(shape_) * 4; }
  std::uint64_t payload_bytes() const {
    return std::uint64_t{sample_count_} * sample_bytes();
  }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  const std::string& model_digest() const { return model_digest_; }
  const std::string& dataset_digest() const { return dataset_digest_; }
  // Tail predictions of the unmodified activations.
  const std::vector<ClassIndex>& golden_predictions() const {
    return golden_predictions_;
  }

  // Activations of chunk `k`, one tensor per sample.
  std::vector<Tensor> ReadChunk(std::size_t k) const;

 private:
  std::filesystem::path dir_;
  std::size_t layer_ = 0;
  Shape shape_;
  std::size_t sample_count_ = 0;
  std::vector<Chunk> chunks_;
  std::string model_digest_;
  std::string dataset_digest_;
  std::vector<ClassIndex> golden_predictions_;
};

inline constexpr char kCacheManifestFile[] = "cache_manifest.json";

// Digest over sample shapes and bits, 16 hex digits.
std::string DatasetDigest(const Dataset& dataset);

}  // namespace bitstorm

#endif  // BITSTORM_ACTIVATION_CACHE_H_
