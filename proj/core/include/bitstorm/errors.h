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

#ifndef BITSTORM_ERRORS_H_
#define BITSTORM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bitstorm {

// Malformed input, failed validation, or a missing input file. The CLI maps
// this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resource exhaustion: memory budget, disk, lock contention. Exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a campaign is cancelled after partial results were flushed.
class Interrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bitstorm

#endif  // BITSTORM_ERRORS_H_
