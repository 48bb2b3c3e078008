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

#include "bitstorm/run_config.h"

#include <set>
#include <string>

#include "binary_io.h"
#include "bitstorm/errors.h"
#include "json.hpp"

namespace bitstorm {
namespace {

using Json = nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "model",  "dataset",       "mode",   "target",    "fault",
    "bit",    "probabilities", "trials", "metric",    "seed",
    "out_dir", "budget",       "cache_dir", "convergence_window",
    "convergence_epsilon"};

[[noreturn]] void KeyError(const std::string& key, const std::string& what) {
  throw ValidationError("config key '" + key + "': " + what);
}

std::string GetString(const Json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) KeyError(key, "missing");
  if (!it->is_string()) KeyError(key, "expected a string");
  return it->get<std::string>();
}

std::uint64_t GetUnsigned(const Json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<long long>() < 0)) {
    KeyError(key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

MicroOpKind ParseOp(const Json& v) {
  if (!v.is_string()) KeyError("target", "operation kinds must be strings");
  try {
    return ParseMicroOpKind(v.get<std::string>());
  } catch (const ValidationError& e) {
    KeyError("target", e.what());
  }
}

void ParseTargets(const Json& target, CampaignSpec& spec) {
  if (target.is_string() && target.get<std::string>() == "all") {
    spec.all_targets = true;
    return;
  }
  if (spec.mode == InjectionMode::kLayerWise) {
    auto add_layer = [&](const Json& v) {
      spec.targets.push_back({GetUnsigned(v, "target"), {}});
    };
    if (target.is_array()) {
      if (target.empty()) KeyError("target", "empty list");
      for (const Json& v : target) add_layer(v);
    } else {
      add_layer(target);
    }
    return;
  }
  if (target.is_string()) {
    spec.targets.push_back({0, {ParseOp(target)}});
    return;
  }
  if (!target.is_array() || target.empty()) {
    KeyError("target", "expected \"all\", an operation kind, or a list");
  }
  for (const Json& v : target) {
    CampaignTarget t;
    if (v.is_array()) {
      for (const Json& op : v) t.ops.insert(ParseOp(op));
      if (t.ops.empty()) KeyError("target", "empty operation group");
    } else {
      t.ops.insert(ParseOp(v));
    }
    spec.targets.push_back(std::move(t));
  }
}

}  // namespace

RunConfig ParseConfig(std::string_view json_text,
                      const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) KeyError(key, "unknown key");
  }

  RunConfig config;
  CampaignSpec& spec = config.campaign;
  config.model_path = Resolve(base_dir, GetString(doc, "model"));
  config.dataset_path = Resolve(base_dir, GetString(doc, "dataset"));
  try {
    spec.mode = ParseInjectionMode(GetString(doc, "mode"));
  } catch (const ValidationError& e) {
    KeyError("mode", e.what());
  }
  if (!doc.contains("target")) KeyError("target", "missing");
  ParseTargets(doc.at("target"), spec);

  try {
    spec.fault = ParseFaultKind(GetString(doc, "fault"));
  } catch (const ValidationError& e) {
    KeyError("fault", e.what());
  }
  if (spec.fault == FaultKind::kBitFlipSpecific) {
    if (!doc.contains("bit")) KeyError("bit", "required for bit_flip_specific");
    const Json& bit = doc.at("bit");
    if (!bit.is_number_integer()) KeyError("bit", "expected an integer");
    const long long b = bit.get<long long>();
    if (b < 0 || b > 31) KeyError("bit", "bit index " + std::to_string(b) + " outside 0..31");
    spec.bit = static_cast<int>(b);
  } else if (doc.contains("bit")) {
    KeyError("bit", "only valid with fault \"bit_flip_specific\"");
  }

  if (!doc.contains("probabilities")) KeyError("probabilities", "missing");
  const Json& probs = doc.at("probabilities");
  if (!probs.is_array() || probs.empty()) {
    KeyError("probabilities", "expected a non-empty list");
  }
  for (const Json& p : probs) {
    if (!p.is_number()) KeyError("probabilities", "expected numbers");
    const double v = p.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      KeyError("probabilities", "value " + p.dump() + " outside [0, 1]");
    }
    spec.probabilities.push_back(v);
  }

  if (doc.contains("trials")) {
    spec.trials = GetUnsigned(doc.at("trials"), "trials");
    if (spec.trials < 1) KeyError("trials", "must be at least 1");
  }
  if (doc.contains("metric")) {
    try {
      spec.metric = ParseMetric(GetString(doc, "metric"));
    } catch (const ValidationError& e) {
      KeyError("metric", e.what());
    }
  }
  if (doc.contains("seed")) spec.seed = GetUnsigned(doc.at("seed"), "seed");
  spec.out_dir = Resolve(base_dir, doc.contains("out_dir")
                                       ? GetString(doc, "out_dir")
                                       : std::string("out"));
  if (doc.contains("cache_dir")) {
    spec.cache_dir = Resolve(base_dir, GetString(doc, "cache_dir"));
  }
  if (doc.contains("budget")) {
    spec.cache_budget = GetUnsigned(doc.at("budget"), "budget");
  }
  if (doc.contains("convergence_window")) {
    spec.convergence_window =
        GetUnsigned(doc.at("convergence_window"), "convergence_window");
  }
  if (doc.contains("convergence_epsilon")) {
    const Json& eps = doc.at("convergence_epsilon");
    if (!eps.is_number()) KeyError("convergence_epsilon", "expected a number");
    spec.convergence_epsilon = eps.get<double>();
  }

  try {
    ValidateCampaignSpec(spec);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return config;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  const std::string text = internal::ReadFile(path);
  try {
    return ParseConfig(text, path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace bitstorm
