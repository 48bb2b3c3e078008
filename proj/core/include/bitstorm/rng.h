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

#ifndef BITSTORM_RNG_H_
#define BITSTORM_RNG_H_

#include <array>
#include <cstdint>
#include <string_view>

namespace bitstorm {

// Name written into every report header so a run can be reproduced.
inline constexpr std::string_view kRngAlgorithm = "philox4x64-10";

// Philox4x64 with 10 rounds (Salmon et al., SC'11). Counter-based: output
// block i is a pure function of (counter, key).
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter Generate(Counter counter, Key key);
};

// A reproducible stream of 64-bit words for one injection site.
//
// The (seed, trial) pair forms the Philox key and (sample, site) occupy two
// counter words, so distinct tuples never share a counter block. Every draw
// consumes exactly one word.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t sample,
            std::uint64_t site);

  std::uint64_t NextU64();
  std::uint32_t NextU32() { return static_cast<std::uint32_t>(NextU64() >> 32); }
  // Uniform in [0, 1) with 53 random bits.
  double NextUnit() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }
  // Uniform in [0, n) by multiply-high; n must be positive.
  std::uint64_t UniformBelow(std::uint64_t n);
  // True with probability p; p <= 0 is never and p >= 1 is always true.
  bool Bernoulli(double p) { return NextUnit() < p; }

  std::uint64_t draws() const { return draws_; }

 private:
  Philox4x64::Key key_;
  Philox4x64::Counter counter_;
  Philox4x64::Counter block_{};
  unsigned used_ = 4;
  std::uint64_t draws_ = 0;
};

inline RngStream DeriveStream(std::uint64_t seed, std::uint64_t trial,
                              std::uint64_t sample, std::uint64_t site) {
  return RngStream(seed, trial, sample, site);
}

}  // namespace bitstorm

#endif  // BITSTORM_RNG_H_
