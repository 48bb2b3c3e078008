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

#include "bitstorm/dataset.h"

#include <algorithm>
#include <string>

#include "binary_io.h"
#include "bitstorm/errors.h"

namespace bitstorm {
namespace {

constexpr std::string_view kSamplesMagic = "BSDS";
constexpr std::string_view kLabelsMagic = "BSLB";
constexpr std::uint32_t kSamplesVersion = 1;

}  // namespace

void ValidateDataset(const Dataset& dataset) {
  if (dataset.samples.empty()) {
    throw ValidationError("dataset must contain at least one sample");
  }
  const Shape& shape = dataset.samples.front().shape();
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    if (dataset.samples[i].shape() != shape) {
      throw ValidationError("sample " + std::to_string(i) + " has shape " +
                            ShapeToString(dataset.samples[i].shape()) +
                            ", expected " + ShapeToString(shape));
    }
  }
  if (dataset.class_count == 0) {
    throw ValidationError("dataset class count must be positive");
  }
  if (dataset.labeled()) {
    if (dataset.labels.size() != dataset.samples.size()) {
      throw ValidationError("dataset has " +
                            std::to_string(dataset.samples.size()) +
                            " samples but " +
                            std::to_string(dataset.labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
      if (dataset.labels[i] >= dataset.class_count) {
        throw ValidationError("label " + std::to_string(dataset.labels[i]) +
                              " of sample " + std::to_string(i) +
                              " is not below class count " +
                              std::to_string(dataset.class_count));
      }
    }
  }
}

Dataset LoadDataset(const std::filesystem::path& dir,
                    std::optional<std::uint32_t> class_count) {
  const std::filesystem::path samples_path = dir / kSamplesFile;
  const std::string bytes = internal::ReadFile(samples_path);
  internal::ByteReader reader(bytes, samples_path.string());
  if (reader.Bytes(4, "magic") != kSamplesMagic) {
    throw ValidationError(samples_path.string() + ": bad magic, expected BSDS");
  }
  const std::uint32_t version = reader.U32("version");
  if (version != kSamplesVersion) {
    throw ValidationError(samples_path.string() + ": unsupported version " +
                          std::to_string(version));
  }
  const std::uint32_t count = reader.U32("sample count");
  const std::uint32_t rank = reader.U32("rank");
  if (rank == 0) throw ValidationError(samples_path.string() + ": rank is 0");
  Shape shape;
  for (std::uint32_t a = 0; a < rank; ++a) {
    shape.push_back(reader.U32("extent"));
    if (shape.back() == 0) {
      throw ValidationError(samples_path.string() + ": zero extent");
    }
  }
  const std::size_t per_sample = NumElements(shape);
  if (reader.remaining() != std::size_t{count} * per_sample * 4) {
    throw ValidationError(samples_path.string() + ": payload holds " +
                          std::to_string(reader.remaining()) +
                          " bytes, header declares " + std::to_string(count) +
                          " samples of " + ShapeToString(shape));
  }
  Dataset dataset;
  dataset.samples.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t(shape);
    internal::LoadFloats(reader.Bytes(per_sample * 4, "payload").data(),
                         t.data());
    dataset.samples.push_back(std::move(t));
  }
  if (dataset.samples.empty()) {
    throw ValidationError(samples_path.string() +
                          ": dataset must contain at least one sample");
  }

  const std::filesystem::path labels_path = dir / kLabelsFile;
  if (std::filesystem::exists(labels_path)) {
    const std::string label_bytes = internal::ReadFile(labels_path);
    internal::ByteReader labels(label_bytes, labels_path.string());
    if (labels.Bytes(4, "magic") != kLabelsMagic) {
      throw ValidationError(labels_path.string() +
                            ": bad magic, expected BSLB");
    }
    const std::uint32_t label_count = labels.U32("label count");
    if (label_count != count) {
      throw ValidationError(labels_path.string() + ": " +
                            std::to_string(label_count) + " labels for " +
                            std::to_string(count) + " samples");
    }
    if (labels.remaining() != std::size_t{label_count} * 4) {
      throw ValidationError(labels_path.string() + ": payload holds " +
                            std::to_string(labels.remaining()) +
                            " bytes, header declares " +
                            std::to_string(label_count) + " labels");
    }
    dataset.labels.reserve(label_count);
    for (std::uint32_t i = 0; i < label_count; ++i) {
      dataset.labels.push_back(labels.U32("label"));
    }
  }

  if (class_count) {
    dataset.class_count = *class_count;
  } else if (dataset.labeled()) {
    dataset.class_count =
        *std::max_element(dataset.labels.begin(), dataset.labels.end()) + 1;
  } else {
    throw ValidationError(dir.string() +
                          ": unlabeled dataset needs an explicit class count");
  }
  ValidateDataset(dataset);
  return dataset;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& dir) {
  ValidateDataset(dataset);
  std::filesystem::create_directories(dir);
  const Shape& shape = dataset.sample_shape();
  std::string bytes(kSamplesMagic);
  internal::AppendU32(bytes, kSamplesVersion);
  internal::AppendU32(bytes, static_cast<std::uint32_t>(dataset.size()));
  internal::AppendU32(bytes, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t extent : shape) {
    internal::AppendU32(bytes, static_cast<std::uint32_t>(extent));
  }
  for (const Tensor& t : dataset.samples) internal::AppendFloats(bytes, t.data());
  internal::WriteFile(dir / kSamplesFile, bytes);

  if (dataset.labeled()) {
    std::string labels(kLabelsMagic);
    internal::AppendU32(labels, static_cast<std::uint32_t>(dataset.labels.size()));
    for (std::uint32_t label : dataset.labels) internal::AppendU32(labels, label);
    internal::WriteFile(dir / kLabelsFile, labels);
  }
}

}  // namespace bitstorm
