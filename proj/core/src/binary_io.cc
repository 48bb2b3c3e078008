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

#include "binary_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bitstorm/errors.h"

namespace bitstorm::internal {

std::string Fnv1aHex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  if (in.bad()) throw ValidationError("failed reading '" + path.string() + "'");
  return std::move(bytes).str();
}

void WriteFile(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot create '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw ResourceError("failed writing '" + path.string() + "'");
}

std::uint32_t ByteReader::U32(const char* field) {
  return LoadU32(Bytes(4, field).data());
}

std::string_view ByteReader::Bytes(std::size_t n, const char* field) {
  if (remaining() < n) {
    throw ValidationError(name_ + ": truncated while reading " + field +
                          " at byte " + std::to_string(pos_));
  }
  std::string_view out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

}  // namespace bitstorm::internal
