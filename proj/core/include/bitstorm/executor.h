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

#ifndef BITSTORM_EXECUTOR_H_
#define BITSTORM_EXECUTOR_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bitstorm/activation_cache.h"
#include "bitstorm/dataset.h"
#include "bitstorm/fault.h"
#include "bitstorm/micro_op.h"
#include "bitstorm/model.h"

namespace bitstorm {

enum class Provenance { kGolden, kInjected };

struct PredictionSet {
  std::vector<ClassIndex> classes;  // one per sample; kInvalidPrediction
  Provenance provenance = Provenance::kGolden;
  std::string spec_digest;          // empty for golden runs

  bool operator==(const PredictionSet&) const = default;
};

struct InjectedRun {
  PredictionSet predictions;
  std::vector<InjectionRecord> records;  // sample order, then site order
};

// Fault-free predictions for every sample.
PredictionSet GoldenRun(const Model& model, const Dataset& dataset);

// Every execution of a targeted micro-op gets its own stream keyed by
// (seed, trial, sample, op id) and one MaybeInject call on its output.
// Throws ValidationError when the spec is not operation-wise or a targeted
// kind never occurs in the model.
InjectedRun RunInjectedOpwise(const MicroOpModel& micro, const Dataset& dataset,
                              const FaultSpec& spec, std::uint64_t trial);

// Executes layers after `layer` on `activation` and predicts.
ClassIndex RunTail(const Model& model, std::size_t layer,
                   const Tensor& activation);

// Injects into a copy of each cached activation, then runs the tail. The
// stream site is the layer that computed the values: Flatten and Dropout
// forward their producer's data unchanged, so they share its stream and a
// fault lands on the same element and bit.
InjectedRun RunInjectedLayerwise(const Model& model,
                                 const ActivationCache& cache,
                                 const FaultSpec& spec, std::uint64_t trial);

// Index of the nearest layer at or before `layer` that is not a Flatten or
// Dropout pass-through (falls back to `layer` itself at the model input).
std::size_t ProducerLayer(const Model& model, std::size_t layer);

}  // namespace bitstorm

#endif  // BITSTORM_EXECUTOR_H_
