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

#ifndef BITSTORM_CAMPAIGN_H_
#define BITSTORM_CAMPAIGN_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitstorm/dataset.h"
#include "bitstorm/executor.h"
#include "bitstorm/fault.h"
#include "bitstorm/micro_op.h"
#include "bitstorm/model.h"

namespace bitstorm {

enum class Metric { kGroundTruth, kGoldenRun };

std::string_view MetricName(Metric metric);  // "ground_truth" | "golden_run"
Metric ParseMetric(std::string_view name);

// One experiment series: a layer (layer-wise) or a set of operation kinds
// injected together (operation-wise).
struct CampaignTarget {
  std::size_t layer = 0;
  MicroOpKindSet ops;

  // "3" for layers, "Add" or "Add+Sub" for operation kinds.
  std::string Label(InjectionMode mode) const;
  bool operator==(const CampaignTarget&) const = default;
};

inline constexpr std::size_t kDefaultConvergenceWindow = 20;
inline constexpr double kDefaultConvergenceEpsilon = 0.002;
inline constexpr std::uint64_t kUnlimitedBudget =
    std::numeric_limits<std::uint64_t>::max();

struct CampaignSpec {
  InjectionMode mode = InjectionMode::kLayerWise;
  bool all_targets = false;  // every layer, or every op kind present
  std::vector<CampaignTarget> targets;
  FaultKind fault = FaultKind::kBitFlipRandom;
  int bit = kNoBit;
  std::vector<double> probabilities;  // sorted, unique, in [0, 1]
  std::size_t trials = 100;
  Metric metric = Metric::kGoldenRun;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  // Activation caches live here; defaults to out_dir / "cache".
  std::filesystem::path cache_dir;
  std::uint64_t cache_budget = kUnlimitedBudget;
  std::size_t convergence_window = kDefaultConvergenceWindow;
  double convergence_epsilon = kDefaultConvergenceEpsilon;
};

// `cache_dir`/layer_<L>, defaulting `cache_dir` to `out_dir`/cache.
std::filesystem::path CacheDirectory(const CampaignSpec& spec,
                                     std::size_t layer);

// Throws ValidationError on a violated invariant.
void ValidateCampaignSpec(const CampaignSpec& spec);

// Expands `all_targets` against the model and checks explicit targets.
std::vector<CampaignTarget> ResolveTargets(const CampaignSpec& spec,
                                           const Model& model);

// Fraction of positions where both predictions agree and are valid.
double Accuracy(std::span<const ClassIndex> predictions,
                std::span<const ClassIndex> reference);
double Accuracy(std::span<const ClassIndex> predictions,
                std::span<const std::uint32_t> labels);

// out[n] = (in[0] + ... + in[n]) / (n + 1), using a running sum so the last
// element is exactly the arithmetic mean computed left to right.
std::vector<double> CumulativeMovingAverage(std::span<const double> series);

struct Convergence {
  bool converged = false;
  std::string note;
  bool operator==(const Convergence&) const = default;
};

// Converged when max - min over the last `window` values is <= epsilon.
// A series shorter than the window is reported as not converged.
Convergence CheckConvergence(std::span<const double> cma, std::size_t window,
                             double epsilon);

struct CellResult {
  CampaignTarget target;
  double probability = 0.0;
  std::uint64_t samples = 0;            // per trial
  std::vector<std::uint64_t> correct;   // per trial
  std::vector<double> accuracy;         // per trial, correct / samples
  std::vector<double> cma;
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by trial count)
  double min = 0.0;
  double max = 0.0;
  Convergence convergence;
  std::vector<InjectionRecord> records;  // trial, then sample, then site

  bool operator==(const CellResult&) const = default;
};

struct LayerInfo {
  std::string name;
  std::string kind;
  bool operator==(const LayerInfo&) const = default;
};

struct CampaignResult {
  InjectionMode mode = InjectionMode::kLayerWise;
  Metric metric = Metric::kGoldenRun;
  FaultKind fault = FaultKind::kBitFlipRandom;
  int bit = kNoBit;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::uint64_t samples = 0;
  double reference_accuracy = 0.0;
  std::size_t convergence_window = kDefaultConvergenceWindow;
  double convergence_epsilon = kDefaultConvergenceEpsilon;
  std::vector<LayerInfo> layers;
  std::vector<CellResult> cells;  // target order, then probability order
  bool complete = true;

  bool operator==(const CampaignResult&) const = default;
};

// Fills mean/std/min/max/CMA/convergence from `correct` and `samples`.
void FinalizeCell(CellResult& cell, std::size_t window, double epsilon);

struct CampaignOptions {
  // Worker threads; 0 defers to ThreadsFromEnvironment().
  unsigned threads = 1;
  // Polled between trials; when set, completed cells are flushed and the
  // run throws Interrupted.
  const std::atomic<bool>* cancel = nullptr;
  // Invoked after each finished cell, in order.
  std::function<void(const CellResult&)> on_cell;
  // When non-empty, partial results are written here before an abort.
  std::filesystem::path flush_dir;
};

// Probability sweep: for every target and probability, `trials` independent
// passes over the dataset with Bernoulli injection per sample (layer-wise)
// or per operation execution (operation-wise).
CampaignResult RunStochastic(const CampaignSpec& spec, const Model& model,
                             const Dataset& dataset,
                             const CampaignOptions& options = {});

// Layer-wise campaign at probability 1 so every sample receives exactly one
// fault. Targets default to every layer. Results are ordered by layer index.
CampaignResult RunDeterministic100(const CampaignSpec& spec,
                                   const Model& model, const Dataset& dataset,
                                   const CampaignOptions& options = {});

// Worker count from BITSTORM_THREADS (0 or unset means hardware concurrency).
unsigned ThreadsFromEnvironment();

}  // namespace bitstorm

#endif  // BITSTORM_CAMPAIGN_H_
