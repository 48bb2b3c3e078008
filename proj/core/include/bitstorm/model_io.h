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

#ifndef BITSTORM_MODEL_IO_H_
#define BITSTORM_MODEL_IO_H_

#include <filesystem>
#include <string>

#include "bitstorm/model.h"

namespace bitstorm {

// Loads a JSON manifest and the weight blob it names (path relative to the
// manifest). Every weight reference is a byte offset/length pair into the
// blob; blob bytes are reinterpreted as little-endian binary32 with no
// conversion. Errors carry the JSON line/column or the field path, e.g.
// "layers[3].kernel.length".
Model LoadModel(const std::filesystem::path& manifest_path);

// Writes the manifest and a weight blob named `weights_file` next to it.
// Blobs are laid out in layer order, each parameter contiguous.
void SaveModel(const Model& model, const std::filesystem::path& manifest_path,
               const std::string& weights_file = "weights.bin");

// Stable digest over structure and weight bits, 16 hex digits.
std::string ModelDigest(const Model& model);

}  // namespace bitstorm

#endif  // BITSTORM_MODEL_IO_H_
