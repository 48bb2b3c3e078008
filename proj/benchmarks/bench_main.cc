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

#include <benchmark/benchmark.h>

#include <bit>
#include <cstdint>

#include "bitstorm/executor.h"
#include "bitstorm/fault.h"
#include "bitstorm/micro_op.h"
#include "bitstorm/model.h"
#include "bitstorm/rng.h"
#include "bitstorm/toy.h"

namespace bitstorm {
namespace {

void BM_Forward(benchmark::State& state) {
  const Model model = MakeToyCnn(1);
  const Dataset data = MakeToyDataset(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Forward(model, data.samples[0]));
  }
}
BENCHMARK(BM_Forward);

void BM_ForwardMicroOps(benchmark::State& state) {
  const MicroOpModel micro = ExpandPrelu(MakeToyPreluCnn(1));
  const Dataset data = MakeToyDataset(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardMicroOps(micro, data.samples[0]));
  }
}
BENCHMARK(BM_ForwardMicroOps);

void BM_RunTail(benchmark::State& state) {
  const Model model = MakeToyCnn(1);
  const std::size_t layer = static_cast<std::size_t>(state.range(0));
  const Tensor act = ForwardHead(model, layer, MakeToyDataset(1, 1).samples[0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunTail(model, layer, act));
  }
}
BENCHMARK(BM_RunTail)->Arg(0)->Arg(6)->Arg(9);

void BM_FlipBit(benchmark::State& state) {
  float v = 1.0f;
  int bit = 0;
  for (auto _ : state) {
    v = FlipBit(v, bit);
    bit = (bit + 1) & 31;
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_FlipBit);

void BM_Philox(benchmark::State& state) {
  Philox4x64::Counter counter{};
  for (auto _ : state) {
    ++counter[0];
    benchmark::DoNotOptimize(Philox4x64::Generate(counter, {1, 2}));
  }
}
BENCHMARK(BM_Philox);

void BM_MaybeInject(benchmark::State& state) {
  Tensor t(Shape{512});
  FaultSpec spec;
  spec.probability = 0.5;
  std::uint64_t sample = 0;
  for (auto _ : state) {
    RngStream rng(1, 0, sample++, 0);
    benchmark::DoNotOptimize(MaybeInject(t, spec, rng));
  }
}
BENCHMARK(BM_MaybeInject);

}  // namespace
}  // namespace bitstorm

BENCHMARK_MAIN();
