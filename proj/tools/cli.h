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

#ifndef BITSTORM_TOOLS_CLI_H_
#define BITSTORM_TOOLS_CLI_H_

#include <atomic>
#include <ostream>

namespace bitstorm {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitResource = 3;

// Runs `bitstorm <golden|cache|campaign|report|gen-toy> ...` and returns the
// process exit code. Console text goes to `out`/`err` and is mirrored into
// run.log in the output directory. Setting `*cancel` stops a running
// campaign after its in-flight trials; partial results are flushed.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err, const std::atomic<bool>* cancel = nullptr);

}  // namespace bitstorm

#endif  // BITSTORM_TOOLS_CLI_H_
