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

#ifndef BITSTORM_FAULT_H_
#define BITSTORM_FAULT_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "bitstorm/micro_op.h"
#include "bitstorm/rng.h"
#include "bitstorm/tensor.h"

namespace bitstorm {

enum class InjectionMode { kOperationWise, kLayerWise };

enum class FaultKind { kZero, kRandomValue, kBitFlipRandom, kBitFlipSpecific };

std::string_view InjectionModeName(InjectionMode mode);  // "op" | "layer"
InjectionMode ParseInjectionMode(std::string_view name);
// "zero" | "random_value" | "bit_flip_random" | "bit_flip_specific"
std::string_view FaultKindName(FaultKind kind);
FaultKind ParseFaultKind(std::string_view name);

inline constexpr int kNoBit = -1;

struct FaultSpec {
  InjectionMode mode = InjectionMode::kLayerWise;
  MicroOpKindSet op_targets;  // operation-wise
  std::size_t layer = 0;      // layer-wise
  FaultKind kind = FaultKind::kBitFlipRandom;
  int bit = kNoBit;           // kBitFlipSpecific only
  double probability = 1.0;
  std::uint64_t seed = 0;
};

// Throws ValidationError when the spec violates its invariants. Pass the
// model's layer count to range-check layer-wise targets.
void ValidateFaultSpec(const FaultSpec& spec,
                       std::optional<std::size_t> layer_count = std::nullopt);

// Stable 64-bit FNV-1a digest of the spec, as 16 hex digits.
std::string FaultSpecDigest(const FaultSpec& spec);

struct InjectionRecord {
  std::uint64_t trial = 0;
  std::uint64_t sample = 0;
  std::uint64_t site = 0;  // layer index or micro-op id
  std::uint64_t element = 0;
  int bit = kNoBit;
  std::uint32_t original_bits = 0;
  std::uint32_t corrupted_bits = 0;

  bool changed() const { return original_bits != corrupted_bits; }
  bool operator==(const InjectionRecord&) const = default;
};

// Result bits are the input bits XOR (1 << bit). bit must be in [0, 31].
float FlipBit(float value, int bit);

// Corrupts tensor[index] in place. Always consumes exactly one draw from
// `rng`; Zero and BitFlipSpecific ignore it. `specific_bit` is read for
// kBitFlipSpecific only. Throws ValidationError on an out-of-range index.
// The record's trial/sample/site fields are left for the caller.
InjectionRecord CorruptElement(Tensor& tensor, std::size_t index,
                               FaultKind kind, int specific_bit,
                               RngStream& rng);

// One Bernoulli(spec.probability) draw, then a uniform element draw, then the
// fault payload draw. All three draws happen whether or not the Bernoulli
// fires. At most one element changes.
std::optional<InjectionRecord> MaybeInject(Tensor& tensor,
                                           const FaultSpec& spec,
                                           RngStream& rng);

inline constexpr std::size_t kDrawsPerInjectionCall = 3;

void WriteRecordsCsvHeader(std::ostream& out);
void WriteRecordsCsv(std::ostream& out, std::span<const InjectionRecord> records);

}  // namespace bitstorm

#endif  // BITSTORM_FAULT_H_
