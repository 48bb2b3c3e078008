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

#ifndef BITSTORM_SRC_BINARY_IO_H_
#define BITSTORM_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace bitstorm::internal {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

inline std::uint32_t ToLittle(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap32(v);
  }
  return v;
}

inline void AppendU32(std::string& out, std::uint32_t v) {
  v = ToLittle(v);
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

inline void AppendFloats(std::string& out, std::span<const float> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = ToLittle(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(&out[start + i * 4], &bits, 4);
  }
}

inline std::uint32_t LoadU32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return ToLittle(v);
}

inline void LoadFloats(const char* p, std::span<float> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(LoadU32(p + i * 4));
  }
}

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string Fnv1aHex(std::string_view bytes);

// Whole-file helpers. ReadFile throws ValidationError when the file is
// missing; WriteFile throws ResourceError on any I/O failure.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view bytes);

// Cursor over a byte buffer that reports truncation with the file name.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  std::uint32_t U32(const char* field);
  std::string_view Bytes(std::size_t n, const char* field);
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace bitstorm::internal

#endif  // BITSTORM_SRC_BINARY_IO_H_
