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

#include "bitstorm/campaign.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "bitstorm/activation_cache.h"
#include "bitstorm/errors.h"
#include "bitstorm/model_io.h"
#include "bitstorm/report.h"

namespace bitstorm {
namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any worker is rethrown after all workers stop.
template <class Fn>
void ParallelFor(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t CountCorrect(std::span<const ClassIndex> predictions,
                           std::span<const ClassIndex> reference) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    n += predictions[i] != kInvalidPrediction && predictions[i] == reference[i];
  }
  return n;
}

ActivationCache ObtainCache(const CampaignSpec& spec, const Model& model,
                            const Dataset& dataset, std::size_t layer) {
  const std::filesystem::path dir = CacheDirectory(spec, layer);
  if (std::filesystem::exists(dir / kCacheManifestFile)) {
    try {
      ActivationCache cache = ActivationCache::Open(dir);
      if (cache.layer() == layer && cache.model_digest() == ModelDigest(model) &&
          cache.dataset_digest() == DatasetDigest(dataset)) {
        return cache;
      }
    } catch (const ValidationError&) {
      // Unreadable cache: rebuild below.
    }
  }
  return ActivationCache::Build(model, dataset, layer, spec.cache_budget, dir);
}

}  // namespace

std::filesystem::path CacheDirectory(const CampaignSpec& spec,
                                     std::size_t layer) {
  std::filesystem::path root = spec.cache_dir;
  if (root.empty()) {
    if (spec.out_dir.empty()) {
      throw ValidationError(
          "layer-wise campaigns need an output or cache directory");
    }
    root = spec.out_dir / "cache";
  }
  return root / ("layer_" + std::to_string(layer));
}

std::string_view MetricName(Metric metric) {
  return metric == Metric::kGroundTruth ? "ground_truth" : "golden_run";
}

Metric ParseMetric(std::string_view name) {
  if (name == "ground_truth") return Metric::kGroundTruth;
  if (name == "golden_run") return Metric::kGoldenRun;
  throw ValidationError("unknown metric '" + std::string(name) +
                        "' (expected \"ground_truth\" or \"golden_run\")");
}

std::string CampaignTarget::Label(InjectionMode mode) const {
  if (mode == InjectionMode::kLayerWise) return std::to_string(layer);
  std::string out;
  for (MicroOpKind kind : ops) {
    if (!out.empty()) out += "+";
    out += MicroOpKindName(kind);
  }
  return out;
}

void ValidateCampaignSpec(const CampaignSpec& spec) {
  if (spec.trials < 1) throw ValidationError("trials must be at least 1");
  if (spec.probabilities.empty()) {
    throw ValidationError("campaign needs at least one probability");
  }
  for (std::size_t i = 0; i < spec.probabilities.size(); ++i) {
    const double p = spec.probabilities[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("probability " + std::to_string(p) +
                            " outside [0, 1]");
    }
    if (i > 0 && !(spec.probabilities[i - 1] < p)) {
      throw ValidationError("probabilities must be sorted and unique");
    }
  }
  if (spec.fault == FaultKind::kBitFlipSpecific &&
      (spec.bit < 0 || spec.bit > 31)) {
    throw ValidationError("bit index " + std::to_string(spec.bit) +
                          " outside 0..31");
  }
  if (!spec.all_targets && spec.targets.empty()) {
    throw ValidationError("campaign needs at least one target");
  }
  if (spec.mode == InjectionMode::kOperationWise) {
    for (const CampaignTarget& t : spec.targets) {
      if (t.ops.empty()) {
        throw ValidationError("operation-wise target without operation kinds");
      }
      if (t.ops.contains(MicroOpKind::kLayer)) {
        throw ValidationError("opaque layers cannot be operation-wise targets");
      }
    }
  }
  if (spec.convergence_window < 2) {
    throw ValidationError("convergence window must be at least 2");
  }
  if (!(spec.convergence_epsilon >= 0.0)) {
    throw ValidationError("convergence epsilon must be non-negative");
  }
}

std::vector<CampaignTarget> ResolveTargets(const CampaignSpec& spec,
                                           const Model& model) {
  std::vector<CampaignTarget> targets;
  if (spec.mode == InjectionMode::kLayerWise) {
    if (spec.all_targets) {
      for (std::size_t i = 0; i < model.layers.size(); ++i) {
        targets.push_back({i, {}});
      }
      return targets;
    }
    for (const CampaignTarget& t : spec.targets) {
      if (t.layer >= model.layers.size()) {
        throw ValidationError("target layer " + std::to_string(t.layer) +
                              " out of range for a model with " +
                              std::to_string(model.layers.size()) + " layers");
      }
      targets.push_back({t.layer, {}});
    }
    return targets;
  }

  const MicroOpModel micro = ExpandPrelu(model);
  if (spec.all_targets) {
    for (MicroOpKind kind :
         {MicroOpKind::kAdd, MicroOpKind::kSub, MicroOpKind::kMul,
          MicroOpKind::kReLU, MicroOpKind::kAbs, MicroOpKind::kConstMul}) {
      if (micro.CountOps({kind}) > 0) targets.push_back({0, {kind}});
    }
    if (targets.empty()) {
      throw ValidationError("model has no elementary operations to target");
    }
    return targets;
  }
  for (const CampaignTarget& t : spec.targets) {
    for (MicroOpKind kind : t.ops) {
      if (micro.CountOps({kind}) == 0) {
        throw ValidationError("target operation " +
                              std::string(MicroOpKindName(kind)) +
                              " does not occur in the model");
      }
    }
    targets.push_back({0, t.ops});
  }
  return targets;
}

double Accuracy(std::span<const ClassIndex> predictions,
                std::span<const ClassIndex> reference) {
  if (predictions.size() != reference.size()) {
    throw ValidationError("accuracy: " + std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(reference.size()) +
                          " references");
  }
  if (predictions.empty()) throw ValidationError("accuracy of zero samples");
  return static_cast<double>(CountCorrect(predictions, reference)) /
         static_cast<double>(predictions.size());
}

double Accuracy(std::span<const ClassIndex> predictions,
                std::span<const std::uint32_t> labels) {
  std::vector<ClassIndex> reference(labels.begin(), labels.end());
  return Accuracy(predictions, reference);
}

std::vector<double> CumulativeMovingAverage(std::span<const double> series) {
  if (series.empty()) throw ValidationError("CMA of an empty series");
  std::vector<double> out;
  out.reserve(series.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < series.size(); ++n) {
    sum += series[n];
    out.push_back(sum / static_cast<double>(n + 1));
  }
  return out;
}

Convergence CheckConvergence(std::span<const double> cma, std::size_t window,
                             double epsilon) {
  if (window < 2) throw ValidationError("convergence window must be >= 2");
  if (cma.size() < window) {
    return {false, "insufficient trials: " + std::to_string(cma.size()) +
                       " < window " + std::to_string(window)};
  }
  auto tail = cma.subspan(cma.size() - window);
  auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  const double spread = *hi - *lo;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "spread %.6g over last %zu trials", spread,
                window);
  return {spread <= epsilon, buf};
}

void FinalizeCell(CellResult& cell, std::size_t window, double epsilon) {
  const std::size_t trials = cell.correct.size();
  if (trials == 0) throw ValidationError("cell has no trials");
  const double per_trial = static_cast<double>(cell.samples);
  cell.accuracy.clear();
  cell.cma.clear();
  // Integer running sums keep the CMA exact up to one final rounding, so its
  // last element equals the mean and a constant series stays constant.
  std::uint64_t running = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    running += cell.correct[t];
    cell.accuracy.push_back(static_cast<double>(cell.correct[t]) / per_trial);
    cell.cma.push_back(static_cast<double>(running) /
                       (static_cast<double>(t + 1) * per_trial));
  }
  cell.mean = cell.cma.back();
  double squares = 0.0;
  for (double a : cell.accuracy) squares += (a - cell.mean) * (a - cell.mean);
  cell.stddev = std::sqrt(squares / static_cast<double>(trials));
  auto [lo, hi] = std::minmax_element(cell.accuracy.begin(), cell.accuracy.end());
  cell.min = *lo;
  cell.max = *hi;
  cell.convergence = CheckConvergence(cell.cma, window, epsilon);
}

unsigned ThreadsFromEnvironment() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("BITSTORM_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  const unsigned long n = std::strtoul(env, &end, 10);
  if (*end != '\0') {
    throw ValidationError("BITSTORM_THREADS must be a non-negative integer");
  }
  return n == 0 ? hw : static_cast<unsigned>(n);
}

CampaignResult RunStochastic(const CampaignSpec& spec, const Model& model,
                             const Dataset& dataset,
                             const CampaignOptions& options) {
  ValidateCampaignSpec(spec);
  ValidateModel(model);
  ValidateDataset(dataset);
  if (spec.metric == Metric::kGroundTruth && !dataset.labeled()) {
    throw ValidationError("ground-truth metric needs a labeled dataset");
  }
  const std::vector<CampaignTarget> targets = ResolveTargets(spec, model);

  const PredictionSet golden = GoldenRun(model, dataset);
  std::vector<ClassIndex> reference;
  if (spec.metric == Metric::kGroundTruth) {
    reference.assign(dataset.labels.begin(), dataset.labels.end());
  } else {
    reference = golden.classes;
  }

  CampaignResult result;
  result.mode = spec.mode;
  result.metric = spec.metric;
  result.fault = spec.fault;
  result.bit = spec.fault == FaultKind::kBitFlipSpecific ? spec.bit : kNoBit;
  result.seed = spec.seed;
  result.trials = spec.trials;
  result.samples = dataset.size();
  result.reference_accuracy = Accuracy(golden.classes, reference);
  result.convergence_window = spec.convergence_window;
  result.convergence_epsilon = spec.convergence_epsilon;
  for (const LayerSpec& layer : model.layers) {
    result.layers.push_back({layer.name, std::string(LayerKindName(layer.kind()))});
  }

  const unsigned threads =
      options.threads == 0 ? ThreadsFromEnvironment() : options.threads;
  auto cancelled = [&] {
    return options.cancel != nullptr && options.cancel->load();
  };
  auto abort_with_partial = [&] {
    result.complete = false;
    if (!options.flush_dir.empty()) {
      EmitReport(result, options.flush_dir);
    }
  };

  try {
    std::optional<MicroOpModel> micro;
    if (spec.mode == InjectionMode::kOperationWise) micro = ExpandPrelu(model);

    for (const CampaignTarget& target : targets) {
      std::optional<ActivationCache> cache;
      if (spec.mode == InjectionMode::kLayerWise) {
        cache = ObtainCache(spec, model, dataset, target.layer);
      }
      for (double p : spec.probabilities) {
        FaultSpec fault;
        fault.mode = spec.mode;
        fault.op_targets = target.ops;
        fault.layer = target.layer;
        fault.kind = spec.fault;
        fault.bit = spec.bit;
        fault.probability = p;
        fault.seed = spec.seed;

        std::vector<InjectedRun> runs(spec.trials);
        std::atomic<bool> stopped{false};
        ParallelFor(spec.trials, threads, [&](std::size_t t) {
          if (cancelled()) {
            stopped = true;
            return;
          }
          runs[t] = spec.mode == InjectionMode::kLayerWise
                        ? RunInjectedLayerwise(model, *cache, fault, t)
                        : RunInjectedOpwise(*micro, dataset, fault, t);
        });
        if (stopped) {
          abort_with_partial();
          throw Interrupted("campaign interrupted after " +
                            std::to_string(result.cells.size()) +
                            " completed cells");
        }

        CellResult cell;
        cell.target = target;
        cell.probability = p;
        cell.samples = dataset.size();
        for (InjectedRun& run : runs) {
          cell.correct.push_back(CountCorrect(run.predictions.classes, reference));
          cell.records.insert(cell.records.end(), run.records.begin(),
                              run.records.end());
        }
        FinalizeCell(cell, spec.convergence_window, spec.convergence_epsilon);
        result.cells.push_back(std::move(cell));
        if (options.on_cell) options.on_cell(result.cells.back());
      }
    }
  } catch (const Interrupted&) {
    throw;
  } catch (...) {
    abort_with_partial();
    throw;
  }
  return result;
}

CampaignResult RunDeterministic100(const CampaignSpec& spec,
                                   const Model& model, const Dataset& dataset,
                                   const CampaignOptions& options) {
  CampaignSpec fixed = spec;
  fixed.mode = InjectionMode::kLayerWise;
  fixed.probabilities = {1.0};
  if (fixed.targets.empty()) fixed.all_targets = true;
  if (!fixed.all_targets) {
    std::sort(fixed.targets.begin(), fixed.targets.end(),
              [](const CampaignTarget& a, const CampaignTarget& b) {
                return a.layer < b.layer;
              });
  }
  return RunStochastic(fixed, model, dataset, options);
}

}  // namespace bitstorm
