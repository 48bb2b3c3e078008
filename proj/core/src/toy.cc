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

#include "bitstorm/toy.h"

#include <cmath>
#include <string>

#include "bitstorm/layers.h"
#include "bitstorm/rng.h"

namespace bitstorm {
namespace {

// Stream tags keep the draws for each artifact disjoint.
constexpr std::uint64_t kPrototypeStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kCnnStream = 3;
constexpr std::uint64_t kPreluStream = 4;

constexpr double kNoiseAmplitude = 0.2;

double Uniform(RngStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.NextUnit();
}

Tensor RandomTensor(RngStream& rng, Shape shape, double lo, double hi) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(Uniform(rng, lo, hi));
  return t;
}

std::vector<float> RandomVector(RngStream& rng, std::size_t n, double lo,
                                double hi) {
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(Uniform(rng, lo, hi));
  return v;
}

class LayerFactory {
 public:
  LayerFactory(std::uint64_t seed, std::uint64_t tag) : seed_(seed), tag_(tag) {}

  LayerSpec Conv(std::string name, std::size_t cin, std::size_t cout,
                 Activation activation) {
    RngStream rng = Next();
    const double limit = std::sqrt(6.0 / static_cast<double>(9 * cin));
    Conv2DParams p;
    p.kernel = RandomTensor(rng, {3, 3, cin, cout}, -limit, limit);
    p.bias = RandomVector(rng, cout, 0.0, 0.1);
    p.padding = Padding::kSame;
    p.activation = activation;
    return {std::move(name), std::move(p)};
  }

  LayerSpec Dense(std::string name, std::size_t in, std::size_t out,
                  Activation activation) {
    RngStream rng = Next();
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    DenseParams p;
    p.weights = RandomTensor(rng, {in, out}, -limit, limit);
    p.bias = RandomVector(rng, out, 0.0, 0.1);
    p.activation = activation;
    return {std::move(name), std::move(p)};
  }

  LayerSpec Prelu(std::string name, Shape alpha_shape) {
    RngStream rng = Next();
    return {std::move(name),
            PreluParams{RandomTensor(rng, std::move(alpha_shape), 0.05, 0.3)}};
  }

 private:
  RngStream Next() { return RngStream(seed_, tag_, index_++, 0); }

  std::uint64_t seed_;
  std::uint64_t tag_;
  std::uint64_t index_ = 0;
};

LayerSpec Pool(std::string name) { return {std::move(name), MaxPool2DParams{}}; }

LayerSpec Drop(std::string name, double rate) {
  return {std::move(name), DropoutParams{rate}};
}

// Sets the last (Dense) layer to score classes by negative squared distance
// between the penultimate features and each prototype's features.
void FitOutputLayer(Model& model, std::uint64_t seed, std::uint32_t classes) {
  const std::size_t penultimate = model.layers.size() - 2;
  const std::vector<Tensor> prototypes = ToyPrototypes(seed, classes);
  std::vector<std::vector<double>> centroids;
  double mean_norm = 0.0;
  for (const Tensor& proto : prototypes) {
    Tensor f = ForwardHead(model, penultimate, proto);
    std::vector<double> c(f.data().begin(), f.data().end());
    double norm = 0.0;
    for (double v : c) norm += v * v;
    mean_norm += norm / classes;
    centroids.push_back(std::move(c));
  }
  const double scale = mean_norm > 0.0 ? 8.0 / mean_norm : 1.0;
  auto& dense = std::get<DenseParams>(model.layers.back().params);
  const std::size_t features = dense.weights.shape()[0];
  for (std::uint32_t c = 0; c < classes; ++c) {
    double norm = 0.0;
    for (std::size_t i = 0; i < features; ++i) {
      dense.weights[i * classes + c] =
          static_cast<float>(scale * centroids[c][i]);
      norm += centroids[c][i] * centroids[c][i];
    }
    dense.bias[c] = static_cast<float>(-0.5 * scale * norm);
  }
}

}  // namespace

Shape ToyInputShape() { return {16, 16, 3}; }

std::vector<Tensor> ToyPrototypes(std::uint64_t seed, std::uint32_t classes) {
  std::vector<Tensor> out;
  for (std::uint32_t c = 0; c < classes; ++c) {
    RngStream rng(seed, kPrototypeStream, c, 0);
    out.push_back(RandomTensor(rng, ToyInputShape(), 0.0, 1.0));
  }
  return out;
}

Dataset MakeToyDataset(std::uint64_t seed, std::size_t samples,
                       std::uint32_t classes) {
  const std::vector<Tensor> prototypes = ToyPrototypes(seed, classes);
  Dataset dataset;
  dataset.class_count = classes;
  for (std::size_t i = 0; i < samples; ++i) {
    const std::uint32_t label = static_cast<std::uint32_t>(i % classes);
    RngStream rng(seed, kNoiseStream, i, 0);
    Tensor x = prototypes[label];
    for (float& v : x.data()) {
      v = static_cast<float>(v + Uniform(rng, -kNoiseAmplitude, kNoiseAmplitude));
    }
    dataset.samples.push_back(std::move(x));
    dataset.labels.push_back(label);
  }
  return dataset;
}

Model MakeToyCnn(std::uint64_t seed, std::uint32_t classes) {
  LayerFactory f(seed, kCnnStream);
  Model model;
  model.input_shape = ToyInputShape();
  model.layers.push_back(f.Conv("conv1", 3, 8, Activation::kReLU));
  model.layers.push_back(f.Conv("conv2", 8, 8, Activation::kReLU));
  model.layers.push_back(Pool("pool1"));
  model.layers.push_back(Drop("dropout1", 0.25));
  model.layers.push_back(f.Conv("conv3", 8, 8, Activation::kReLU));
  model.layers.push_back(f.Conv("conv4", 8, 8, Activation::kReLU));
  model.layers.push_back(Pool("pool2"));
  model.layers.push_back(Drop("dropout2", 0.25));
  model.layers.push_back({"flatten", FlattenParams{}});
  model.layers.push_back(f.Dense("dense1", 128, 32, Activation::kReLU));
  model.layers.push_back(Drop("dropout3", 0.5));
  model.layers.push_back(f.Dense("dense2", 32, classes, Activation::kSoftmax));
  FitOutputLayer(model, seed, classes);
  return model;
}

Model MakeToyPreluCnn(std::uint64_t seed, std::uint32_t classes) {
  LayerFactory f(seed, kPreluStream);
  Model model;
  model.input_shape = ToyInputShape();
  model.layers.push_back(f.Conv("conv1", 3, 8, Activation::kLinear));
  model.layers.push_back(f.Prelu("prelu1", {1, 1, 8}));
  model.layers.push_back(Pool("pool1"));
  model.layers.push_back(f.Conv("conv2", 8, 8, Activation::kLinear));
  model.layers.push_back(f.Prelu("prelu2", {1, 1, 8}));
  model.layers.push_back(Pool("pool2"));
  model.layers.push_back({"flatten", FlattenParams{}});
  model.layers.push_back(f.Dense("dense1", 128, 32, Activation::kLinear));
  model.layers.push_back(f.Prelu("prelu3", {32}));
  model.layers.push_back(Drop("dropout1", 0.5));
  model.layers.push_back(f.Dense("dense2", 32, classes, Activation::kSoftmax));
  FitOutputLayer(model, seed, classes);
  return model;
}

}  // namespace bitstorm
