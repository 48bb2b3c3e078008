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

#include "bitstorm/fault.h"

#include <cstdio>
#include <ostream>

#include "binary_io.h"
#include "bitstorm/errors.h"

namespace bitstorm {
namespace {

std::string Hex32(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

}  // namespace

std::string_view InjectionModeName(InjectionMode mode) {
  return mode == InjectionMode::kOperationWise ? "op" : "layer";
}

InjectionMode ParseInjectionMode(std::string_view name) {
  if (name == "op") return InjectionMode::kOperationWise;
  if (name == "layer") return InjectionMode::kLayerWise;
  throw ValidationError("unknown injection mode '" + std::string(name) +
                        "' (expected \"op\" or \"layer\")");
}

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kZero:
      return "zero";
    case FaultKind::kRandomValue:
      return "random_value";
    case FaultKind::kBitFlipRandom:
      return "bit_flip_random";
    case FaultKind::kBitFlipSpecific:
      return "bit_flip_specific";
  }
  return "zero";
}

FaultKind ParseFaultKind(std::string_view name) {
  if (name == "zero") return FaultKind::kZero;
  if (name == "random_value") return FaultKind::kRandomValue;
  if (name == "bit_flip_random") return FaultKind::kBitFlipRandom;
  if (name == "bit_flip_specific") return FaultKind::kBitFlipSpecific;
  throw ValidationError("unknown fault kind '" + std::string(name) + "'");
}

void ValidateFaultSpec(const FaultSpec& spec,
                       std::optional<std::size_t> layer_count) {
  if (!(spec.probability >= 0.0 && spec.probability <= 1.0)) {
    throw ValidationError("injection probability " +
                          std::to_string(spec.probability) +
                          " outside [0, 1]");
  }
  if (spec.kind == FaultKind::kBitFlipSpecific &&
      (spec.bit < 0 || spec.bit > 31)) {
    throw ValidationError("bit index " + std::to_string(spec.bit) +
                          " outside 0..31");
  }
  if (spec.mode == InjectionMode::kOperationWise) {
    if (spec.op_targets.empty()) {
      throw ValidationError("operation-wise injection needs at least one "
                            "target operation kind");
    }
    if (spec.op_targets.contains(MicroOpKind::kLayer)) {
      throw ValidationError("opaque layers cannot be operation-wise targets");
    }
  } else if (layer_count && spec.layer >= *layer_count) {
    throw ValidationError("target layer " + std::to_string(spec.layer) +
                          " out of range for a model with " +
                          std::to_string(*layer_count) + " layers");
  }
}

std::string FaultSpecDigest(const FaultSpec& spec) {
  std::string text(InjectionModeName(spec.mode));
  text += ";targets=";
  for (MicroOpKind k : spec.op_targets) {
    text += MicroOpKindName(k);
    text += ",";
  }
  text += ";layer=" + std::to_string(spec.layer);
  text += ";fault=" + std::string(FaultKindName(spec.kind));
  text += ";bit=" + std::to_string(spec.bit);
  char prob[32];
  std::snprintf(prob, sizeof(prob), "%.17g", spec.probability);
  text += ";p=";
  text += prob;
  text += ";seed=" + std::to_string(spec.seed);
  return internal::Fnv1aHex(text);
}

float FlipBit(float value, int bit) {
  return FloatFromBits(FloatBits(value) ^ (std::uint32_t{1} << bit));
}

InjectionRecord CorruptElement(Tensor& tensor, std::size_t index,
                               FaultKind kind, int specific_bit,
                               RngStream& rng) {
  if (index >= tensor.size()) {
    throw ValidationError("element index " + std::to_string(index) +
                          " out of range for a tensor of " +
                          std::to_string(tensor.size()) + " elements");
  }
  const std::uint64_t payload = rng.NextU64();
  InjectionRecord record;
  record.element = index;
  record.original_bits = FloatBits(tensor[index]);
  std::uint32_t bits = record.original_bits;
  switch (kind) {
    case FaultKind::kZero:
      bits = 0;
      break;
    case FaultKind::kRandomValue:
      bits = static_cast<std::uint32_t>(payload >> 32);
      break;
    case FaultKind::kBitFlipRandom:
      record.bit = static_cast<int>(
          (static_cast<unsigned __int128>(payload) * 32) >> 64);
      bits ^= std::uint32_t{1} << record.bit;
      break;
    case FaultKind::kBitFlipSpecific:
      record.bit = specific_bit;
      bits ^= std::uint32_t{1} << specific_bit;
      break;
  }
  record.corrupted_bits = bits;
  tensor[index] = FloatFromBits(bits);
  return record;
}

std::optional<InjectionRecord> MaybeInject(Tensor& tensor,
                                           const FaultSpec& spec,
                                           RngStream& rng) {
  const bool fire = rng.Bernoulli(spec.probability);
  const std::uint64_t index = rng.UniformBelow(tensor.size());
  if (!fire) {
    rng.NextU64();
    return std::nullopt;
  }
  return CorruptElement(tensor, index, spec.kind, spec.bit, rng);
}

void WriteRecordsCsvHeader(std::ostream& out) {
  out << "trial,sample,site,element,bit,original_hex,corrupted_hex\n";
}

void WriteRecordsCsv(std::ostream& out,
                     std::span<const InjectionRecord> records) {
  for (const InjectionRecord& r : records) {
    out << r.trial << ',' << r.sample << ',' << r.site << ',' << r.element
        << ',' << r.bit << ',' << Hex32(r.original_bits) << ','
        << Hex32(r.corrupted_bits) << '\n';
  }
}

}  // namespace bitstorm
