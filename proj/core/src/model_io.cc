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

#include "bitstorm/model_io.h"

#include <optional>
#include <variant>

#include "binary_io.h"
#include "bitstorm/errors.h"
#include "json.hpp"

namespace bitstorm {
namespace {

using Json = nlohmann::ordered_json;

constexpr char kFormat[] = "bitstorm-model";
constexpr int kVersion = 1;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void FieldError(const std::string& where, const std::string& what) {
  throw ValidationError("model manifest: " + where + ": " + what);
}

const Json& Require(const Json& obj, const std::string& where,
                    const char* key) {
  if (!obj.is_object()) FieldError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) FieldError(where + "." + key, "missing");
  return *it;
}

std::uint64_t AsUnsigned(const Json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    FieldError(where, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string AsString(const Json& v, const std::string& where) {
  if (!v.is_string()) FieldError(where, "expected a string");
  return v.get<std::string>();
}

Shape AsShape(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) FieldError(where, "expected a non-empty array");
  Shape shape;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t extent = AsUnsigned(v[i], where + "[" + std::to_string(i) + "]");
    if (extent == 0) FieldError(where, "extents must be positive");
    shape.push_back(extent);
  }
  return shape;
}

std::pair<std::size_t, std::size_t> AsPair(const Json& v,
                                           const std::string& where) {
  if (!v.is_array() || v.size() != 2) FieldError(where, "expected [h, w]");
  return {AsUnsigned(v[0], where + "[0]"), AsUnsigned(v[1], where + "[1]")};
}

Tensor ReadBlob(const Json& ref, const std::string& where,
                std::string_view blob) {
  Shape shape = AsShape(Require(ref, where, "shape"), where + ".shape");
  std::uint64_t offset = AsUnsigned(Require(ref, where, "offset"), where + ".offset");
  std::uint64_t length = AsUnsigned(Require(ref, where, "length"), where + ".length");
  if (length != NumElements(shape) * 4) {
    FieldError(where + ".length", std::to_string(length) + " bytes, shape " +
                                      ShapeToString(shape) + " needs " +
                                      std::to_string(NumElements(shape) * 4));
  }
  if (offset % 4 != 0) FieldError(where + ".offset", "must be a multiple of 4");
  if (offset > blob.size() || length > blob.size() - offset) {
    FieldError(where, "range [" + std::to_string(offset) + ", " +
                          std::to_string(offset + length) +
                          ") lies outside the " + std::to_string(blob.size()) +
                          "-byte weight blob");
  }
  Tensor t(shape);
  internal::LoadFloats(blob.data() + offset, t.data());
  return t;
}

std::vector<float> ReadVector(const Json& ref, const std::string& where,
                              std::string_view blob) {
  Tensor t = ReadBlob(ref, where, blob);
  if (t.rank() != 1) FieldError(where + ".shape", "expected rank 1");
  return {t.data().begin(), t.data().end()};
}

LayerSpec ParseLayer(const Json& j, const std::string& where,
                     std::string_view blob) {
  LayerSpec layer;
  layer.name = AsString(Require(j, where, "name"), where + ".name");
  const std::string kind = AsString(Require(j, where, "kind"), where + ".kind");
  LayerKind parsed_kind;
  try {
    parsed_kind = ParseLayerKind(kind);
  } catch (const ValidationError& e) {
    FieldError(where + ".kind", e.what());
  }
  auto activation = [&]() {
    auto it = j.find("activation");
    if (it == j.end()) return Activation::kLinear;
    try {
      return ParseActivation(AsString(*it, where + ".activation"));
    } catch (const ValidationError& e) {
      FieldError(where + ".activation", e.what());
    }
  };
  switch (parsed_kind) {
    case LayerKind::kConv2D: {
      Conv2DParams p;
      p.kernel = ReadBlob(Require(j, where, "kernel"), where + ".kernel", blob);
      p.bias = ReadVector(Require(j, where, "bias"), where + ".bias", blob);
      std::tie(p.stride_h, p.stride_w) =
          AsPair(Require(j, where, "stride"), where + ".stride");
      try {
        p.padding = ParsePadding(
            AsString(Require(j, where, "padding"), where + ".padding"));
      } catch (const ValidationError& e) {
        FieldError(where + ".padding", e.what());
      }
      p.activation = activation();
      layer.params = std::move(p);
      break;
    }
    case LayerKind::kMaxPool2D: {
      MaxPool2DParams p;
      std::tie(p.pool_h, p.pool_w) =
          AsPair(Require(j, where, "window"), where + ".window");
      std::tie(p.stride_h, p.stride_w) =
          AsPair(Require(j, where, "stride"), where + ".stride");
      layer.params = p;
      break;
    }
    case LayerKind::kDense: {
      DenseParams p;
      p.weights = ReadBlob(Require(j, where, "weights"), where + ".weights", blob);
      p.bias = ReadVector(Require(j, where, "bias"), where + ".bias", blob);
      p.activation = activation();
      layer.params = std::move(p);
      break;
    }
    case LayerKind::kReLU:
      layer.params = ReluParams{};
      break;
    case LayerKind::kPReLU:
      layer.params =
          PreluParams{ReadBlob(Require(j, where, "alpha"), where + ".alpha", blob)};
      break;
    case LayerKind::kSoftmax:
      layer.params = SoftmaxParams{};
      break;
    case LayerKind::kFlatten:
      layer.params = FlattenParams{};
      break;
    case LayerKind::kDropout: {
      const Json& rate = Require(j, where, "rate");
      if (!rate.is_number()) FieldError(where + ".rate", "expected a number");
      double r = rate.get<double>();
      if (!(r >= 0.0 && r < 1.0)) FieldError(where + ".rate", "must lie in [0, 1)");
      layer.params = DropoutParams{r};
      break;
    }
  }
  return layer;
}

// Appends `values` to the blob and returns the manifest reference.
Json BlobRef(std::string& blob, const Shape& shape, std::span<const float> values) {
  Json ref;
  ref["shape"] = shape;
  ref["offset"] = blob.size();
  ref["length"] = values.size() * 4;
  internal::AppendFloats(blob, values);
  return ref;
}

Json LayerToJson(const LayerSpec& layer, std::string& blob) {
  Json j;
  j["name"] = layer.name;
  j["kind"] = std::string(LayerKindName(layer.kind()));
  std::visit(
      Overloaded{
          [&](const Conv2DParams& p) {
            j["kernel"] = BlobRef(blob, p.kernel.shape(), p.kernel.data());
            j["bias"] = BlobRef(blob, {p.bias.size()}, p.bias);
            j["stride"] = {p.stride_h, p.stride_w};
            j["padding"] = std::string(PaddingName(p.padding));
            j["activation"] = std::string(ActivationName(p.activation));
          },
          [&](const MaxPool2DParams& p) {
            j["window"] = {p.pool_h, p.pool_w};
            j["stride"] = {p.stride_h, p.stride_w};
          },
          [&](const DenseParams& p) {
            j["weights"] = BlobRef(blob, p.weights.shape(), p.weights.data());
            j["bias"] = BlobRef(blob, {p.bias.size()}, p.bias);
            j["activation"] = std::string(ActivationName(p.activation));
          },
          [&](const ReluParams&) {},
          [&](const PreluParams& p) {
            j["alpha"] = BlobRef(blob, p.alpha.shape(), p.alpha.data());
          },
          [&](const SoftmaxParams&) {},
          [&](const FlattenParams&) {},
          [&](const DropoutParams& p) { j["rate"] = p.rate; },
      },
      layer.params);
  return j;
}

}  // namespace

Model LoadModel(const std::filesystem::path& manifest_path) {
  const std::string text = internal::ReadFile(manifest_path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  try {
    if (!doc.is_object()) FieldError("$", "expected an object");
    auto format = doc.find("format");
    if (format != doc.end() && *format != kFormat) {
      FieldError("format", "expected \"" + std::string(kFormat) + "\"");
    }
    auto version = doc.find("version");
    if (version != doc.end() && *version != kVersion) {
      FieldError("version", "unsupported");
    }
    const std::string weights_name = AsString(Require(doc, "$", "weights"), "weights");
    const std::string blob =
        internal::ReadFile(manifest_path.parent_path() / weights_name);

    Model model;
    model.input_shape = AsShape(Require(doc, "$", "input_shape"), "input_shape");
    const Json& layers = Require(doc, "$", "layers");
    if (!layers.is_array()) FieldError("layers", "expected an array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      model.layers.push_back(
          ParseLayer(layers[i], "layers[" + std::to_string(i) + "]", blob));
    }
    ValidateModel(model);
    return model;
  } catch (const ValidationError& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
}

void SaveModel(const Model& model, const std::filesystem::path& manifest_path,
               const std::string& weights_file) {
  ValidateModel(model);
  std::string blob;
  Json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["weights"] = weights_file;
  doc["input_shape"] = model.input_shape;
  Json layers = Json::array();
  for (const LayerSpec& layer : model.layers) {
    layers.push_back(LayerToJson(layer, blob));
  }
  doc["layers"] = std::move(layers);
  if (manifest_path.has_parent_path()) {
    std::filesystem::create_directories(manifest_path.parent_path());
  }
  internal::WriteFile(manifest_path.parent_path() / weights_file, blob);
  internal::WriteFile(manifest_path, doc.dump(2) + "\n");
}

std::string ModelDigest(const Model& model) {
  std::string blob;
  Json doc;
  doc["input_shape"] = model.input_shape;
  for (const LayerSpec& layer : model.layers) {
    doc["layers"].push_back(LayerToJson(layer, blob));
  }
  return internal::Fnv1aHex(doc.dump() + blob);
}

}  // namespace bitstorm
