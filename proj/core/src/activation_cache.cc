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

#include "bitstorm/activation_cache.h"

#include <algorithm>
#include <system_error>

#include "binary_io.h"
#include "bitstorm/errors.h"
#include "bitstorm/executor.h"
#include "bitstorm/model_io.h"
#include "json.hpp"

namespace bitstorm {
namespace {

using Json = nlohmann::ordered_json;

constexpr char kCacheFormat[] = "bitstorm-activation-cache";
constexpr int kCacheVersion = 1;

std::string ChunkName(std::size_t k) {
  return "chunk_" + std::to_string(k) + ".bin";
}

}  // namespace

std::string DatasetDigest(const Dataset& dataset) {
  std::string bytes = ShapeToString(dataset.sample_shape());
  internal::AppendU32(bytes, static_cast<std::uint32_t>(dataset.size()));
  for (const Tensor& t : dataset.samples) internal::AppendFloats(bytes, t.data());
  return internal::Fnv1aHex(bytes);
}

ActivationCache ActivationCache::Build(const Model& model,
                                       const Dataset& dataset,
                                       std::size_t layer,
                                       std::uint64_t budget_bytes,
                                       const std::filesystem::path& dir) {
  const std::vector<Shape> shapes = ValidateModel(model);
  ValidateDataset(dataset);
  if (layer >= model.layers.size()) {
    throw ValidationError("cache layer " + std::to_string(layer) +
                          " out of range for a model with " +
                          std::to_string(model.layers.size()) + " layers");
  }
  if (dataset.sample_shape() != model.input_shape) {
    throw ValidationError("dataset samples have shape " +
                          ShapeToString(dataset.sample_shape()) +
                          ", model expects " + ShapeToString(model.input_shape));
  }

  ActivationCache cache;
  cache.dir_ = dir;
  cache.layer_ = layer;
  cache.shape_ = shapes[layer];
  cache.sample_count_ = dataset.size();
  cache.model_digest_ = ModelDigest(model);
  cache.dataset_digest_ = DatasetDigest(dataset);

  const std::uint64_t per_sample = cache.sample_bytes();
  if (budget_bytes < per_sample) {
    throw ResourceError("cache budget of " + std::to_string(budget_bytes) +
                        " bytes cannot hold one " +
                        std::to_string(per_sample) + "-byte activation of layer " +
                        std::to_string(layer));
  }
  const std::size_t per_chunk = static_cast<std::size_t>(
      std::min<std::uint64_t>(budget_bytes / per_sample, cache.sample_count_));

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ResourceError("cannot create cache directory '" + dir.string() +
                        "': " + ec.message());
  }
  const std::filesystem::space_info space = std::filesystem::space(dir, ec);
  if (!ec && space.available < cache.payload_bytes()) {
    throw ResourceError("cache needs " + std::to_string(cache.payload_bytes()) +
                        " bytes, only " + std::to_string(space.available) +
                        " available in '" + dir.string() + "'");
  }
  // Stale chunks from an earlier build with a different chunk size.
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("chunk_") && name.ends_with(".bin")) {
      std::filesystem::remove(entry.path());
    }
  }
  std::filesystem::remove(dir / kCacheManifestFile, ec);

  std::string buffer;
  buffer.reserve(per_chunk * per_sample);
  for (std::size_t first = 0; first < cache.sample_count_; first += per_chunk) {
    const std::size_t count = std::min(per_chunk, cache.sample_count_ - first);
    buffer.clear();
    for (std::size_t s = first; s < first + count; ++s) {
      Tensor activation = ForwardHead(model, layer, dataset.samples[s]);
      cache.golden_predictions_.push_back(
          Predict(ForwardTail(model, layer, activation)));
      internal::AppendFloats(buffer, activation.data());
    }
    Chunk chunk{ChunkName(cache.chunks_.size()), first, count};
    internal::WriteFile(dir / chunk.file, buffer);
    cache.chunks_.push_back(std::move(chunk));
  }

  Json manifest;
  manifest["format"] = kCacheFormat;
  manifest["version"] = kCacheVersion;
  manifest["layer"] = layer;
  manifest["layer_name"] = model.layers[layer].name;
  manifest["model_digest"] = cache.model_digest_;
  manifest["dataset_digest"] = cache.dataset_digest_;
  manifest["sample_count"] = cache.sample_count_;
  manifest["shape"] = cache.shape_;
  manifest["sample_bytes"] = per_sample;
  manifest["budget_bytes"] = budget_bytes;
  manifest["samples_per_chunk"] = per_chunk;
  Json chunks = Json::array();
  for (const Chunk& c : cache.chunks_) {
    chunks.push_back({{"file", c.file},
                      {"first_sample", c.first_sample},
                      {"count", c.count},
                      {"bytes", c.count * per_sample}});
  }
  manifest["chunks"] = std::move(chunks);
  manifest["golden_predictions"] = cache.golden_predictions_;
  internal::WriteFile(dir / kCacheManifestFile, manifest.dump(2) + "\n");
  return cache;
}

ActivationCache ActivationCache::Open(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / kCacheManifestFile;
  Json manifest;
  try {
    manifest = Json::parse(internal::ReadFile(manifest_path));
  } catch (const Json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  ActivationCache cache;
  try {
    if (manifest.at("format") != kCacheFormat ||
        manifest.at("version") != kCacheVersion) {
      throw ValidationError("not a version 1 activation cache");
    }
    cache.dir_ = dir;
    cache.layer_ = manifest.at("layer").get<std::size_t>();
    cache.shape_ = manifest.at("shape").get<Shape>();
    cache.sample_count_ = manifest.at("sample_count").get<std::size_t>();
    cache.model_digest_ = manifest.at("model_digest").get<std::string>();
    cache.dataset_digest_ = manifest.at("dataset_digest").get<std::string>();
    cache.golden_predictions_ =
        manifest.at("golden_predictions").get<std::vector<ClassIndex>>();
    std::size_t expected_first = 0;
    for (const Json& c : manifest.at("chunks")) {
      Chunk chunk{c.at("file").get<std::string>(),
                  c.at("first_sample").get<std::size_t>(),
                  c.at("count").get<std::size_t>()};
      if (chunk.first_sample != expected_first || chunk.count == 0) {
        throw ValidationError("chunk map is not contiguous");
      }
      expected_first += chunk.count;
      cache.chunks_.push_back(std::move(chunk));
    }
    if (expected_first != cache.sample_count_ ||
        cache.golden_predictions_.size() != cache.sample_count_ ||
        cache.shape_.empty() || NumElements(cache.shape_) == 0) {
      throw ValidationError("sample count disagrees with chunk map");
    }
  } catch (const Json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  return cache;
}

std::vector<Tensor> ActivationCache::ReadChunk(std::size_t k) const {
  const Chunk& chunk = chunks_.at(k);
  const std::string bytes = internal::ReadFile(dir_ / chunk.file);
  const std::size_t per_sample = sample_bytes();
  if (bytes.size() != chunk.count * per_sample) {
    throw ValidationError((dir_ / chunk.file).string() + ": holds " +
                          std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(chunk.count * per_sample));
  }
  std::vector<Tensor> out;
  out.reserve(chunk.count);
  for (std::size_t i = 0; i < chunk.count; ++i) {
    Tensor t(shape_);
    internal::LoadFloats(bytes.data() + i * per_sample, t.data());
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace bitstorm
