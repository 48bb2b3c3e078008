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

#include "bitstorm/executor.h"

#include <string>

#include "bitstorm/errors.h"

namespace bitstorm {
namespace {

bool IsPassThrough(const LayerSpec& layer) {
  const LayerKind kind = layer.kind();
  return kind == LayerKind::kFlatten || kind == LayerKind::kDropout;
}

void CheckDatasetFits(const Model& model, const Dataset& dataset) {
  ValidateDataset(dataset);
  if (dataset.sample_shape() != model.input_shape) {
    throw ValidationError("dataset samples have shape " +
                          ShapeToString(dataset.sample_shape()) +
                          ", model expects " + ShapeToString(model.input_shape));
  }
}

}  // namespace

std::size_t ProducerLayer(const Model& model, std::size_t layer) {
  while (layer > 0 && IsPassThrough(model.layers[layer])) --layer;
  return layer;
}

PredictionSet GoldenRun(const Model& model, const Dataset& dataset) {
  ValidateModel(model);
  CheckDatasetFits(model, dataset);
  PredictionSet out;
  out.provenance = Provenance::kGolden;
  out.classes.reserve(dataset.size());
  for (const Tensor& sample : dataset.samples) {
    out.classes.push_back(Predict(Forward(model, sample)));
  }
  return out;
}

InjectedRun RunInjectedOpwise(const MicroOpModel& micro, const Dataset& dataset,
                              const FaultSpec& spec, std::uint64_t trial) {
  if (spec.mode != InjectionMode::kOperationWise) {
    throw ValidationError("operation-wise run needs an operation-wise spec");
  }
  ValidateFaultSpec(spec);
  for (MicroOpKind kind : spec.op_targets) {
    if (micro.CountOps({kind}) == 0) {
      throw ValidationError("target operation " +
                            std::string(MicroOpKindName(kind)) +
                            " does not occur in the model");
    }
  }
  CheckDatasetFits(micro.model, dataset);

  InjectedRun run;
  run.predictions.provenance = Provenance::kInjected;
  run.predictions.spec_digest = FaultSpecDigest(spec);
  run.predictions.classes.reserve(dataset.size());
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    auto hook = [&](const MicroOp& op, Tensor& out) {
      if (!spec.op_targets.contains(op.kind)) return;
      RngStream rng = DeriveStream(spec.seed, trial, s, op.id);
      if (auto record = MaybeInject(out, spec, rng)) {
        record->trial = trial;
        record->sample = s;
        record->site = op.id;
        run.records.push_back(*record);
      }
    };
    run.predictions.classes.push_back(
        Predict(ForwardMicroOps(micro, dataset.samples[s], hook)));
  }
  return run;
}

ClassIndex RunTail(const Model& model, std::size_t layer,
                   const Tensor& activation) {
  const std::vector<Shape> shapes = ValidateModel(model);
  if (layer >= shapes.size()) {
    throw ValidationError("layer index " + std::to_string(layer) +
                          " out of range");
  }
  if (activation.shape() != shapes[layer]) {
    throw ValidationError("activation shape " +
                          ShapeToString(activation.shape()) +
                          " does not match output " +
                          ShapeToString(shapes[layer]) + " of layer " +
                          std::to_string(layer));
  }
  return Predict(ForwardTail(model, layer, activation));
}

InjectedRun RunInjectedLayerwise(const Model& model,
                                 const ActivationCache& cache,
                                 const FaultSpec& spec, std::uint64_t trial) {
  if (spec.mode != InjectionMode::kLayerWise) {
    throw ValidationError("layer-wise run needs a layer-wise spec");
  }
  const std::vector<Shape> shapes = ValidateModel(model);
  ValidateFaultSpec(spec, model.layers.size());
  if (cache.layer() != spec.layer) {
    throw ValidationError("cache holds layer " + std::to_string(cache.layer()) +
                          " but the spec targets layer " +
                          std::to_string(spec.layer));
  }
  if (cache.shape() != shapes[spec.layer]) {
    throw ValidationError("cache shape " + ShapeToString(cache.shape()) +
                          " does not match layer " +
                          std::to_string(spec.layer) + " output " +
                          ShapeToString(shapes[spec.layer]));
  }
  const std::size_t site = ProducerLayer(model, spec.layer);

  InjectedRun run;
  run.predictions.provenance = Provenance::kInjected;
  run.predictions.spec_digest = FaultSpecDigest(spec);
  run.predictions.classes.reserve(cache.sample_count());
  for (std::size_t k = 0; k < cache.chunks().size(); ++k) {
    const std::size_t first = cache.chunks()[k].first_sample;
    std::vector<Tensor> activations = cache.ReadChunk(k);
    for (std::size_t i = 0; i < activations.size(); ++i) {
      const std::size_t s = first + i;
      Tensor& activation = activations[i];
      RngStream rng = DeriveStream(spec.seed, trial, s, site);
      std::optional<InjectionRecord> record = MaybeInject(activation, spec, rng);
      if (record && record->changed()) {
        run.predictions.classes.push_back(
            Predict(ForwardTail(model, spec.layer, activation)));
      } else {
        run.predictions.classes.push_back(cache.golden_predictions()[s]);
      }
      if (record) {
        record->trial = trial;
        record->sample = s;
        record->site = spec.layer;
        run.records.push_back(*record);
      }
    }
  }
  return run;
}

}  // namespace bitstorm
