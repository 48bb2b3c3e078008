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

#ifndef BITSTORM_RUN_CONFIG_H_
#define BITSTORM_RUN_CONFIG_H_

#include <filesystem>
#include <string_view>

#include "bitstorm/campaign.h"

namespace bitstorm {

// A validated run description. Relative paths in the document are resolved
// against the directory holding the config file.
struct RunConfig {
  std::filesystem::path model_path;
  std::filesystem::path dataset_path;
  CampaignSpec campaign;
};

// Keys: model, dataset, mode ("op" | "layer"), target, fault
// ("zero" | "random_value" | "bit_flip_random" | "bit_flip_specific"),
// bit (0-31, required iff bit_flip_specific), probabilities, trials,
// metric ("ground_truth" | "golden_run"), seed, out_dir. Optional extras:
// budget (cache bytes), cache_dir, convergence_window, convergence_epsilon.
//
// `target` is "all", a layer index or list of indices (layer mode), or an
// operation kind or list of kinds (op mode). A nested list such as
// [["Add", "Sub"]] injects into several kinds within one experiment.
//
// Throws ValidationError naming the offending key.
RunConfig LoadConfig(const std::filesystem::path& path);
RunConfig ParseConfig(std::string_view json_text,
                      const std::filesystem::path& base_dir);

}  // namespace bitstorm

#endif  // BITSTORM_RUN_CONFIG_H_
