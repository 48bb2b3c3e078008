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

#include "cli.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "bitstorm/activation_cache.h"
#include "bitstorm/campaign.h"
#include "bitstorm/dataset.h"
#include "bitstorm/errors.h"
#include "bitstorm/executor.h"
#include "bitstorm/model_io.h"
#include "bitstorm/report.h"
#include "bitstorm/run_config.h"
#include "bitstorm/toy.h"
#include "json.hpp"

namespace bitstorm {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr char kLogFile[] = "run.log";
constexpr char kLockFile[] = ".bitstorm.lock";
constexpr char kGoldenFile[] = "golden.json";
constexpr char kSummaryFile[] = "summary.json";

// Writes console text and mirrors it into run.log once the output directory
// is known; earlier text is buffered and flushed on open.
class Console {
 public:
  Console(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void OpenLog(const fs::path& dir) {
    if (log_.is_open()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      throw ResourceError("cannot create '" + dir.string() + "': " +
                          ec.message());
    }
    log_.open(dir / kLogFile, std::ios::app);
    if (!log_) {
      throw ResourceError("cannot open '" + (dir / kLogFile).string() + "'");
    }
    log_ << pending_.str();
    log_.flush();
    pending_.str("");
  }

  void Out(std::string_view text) {
    out_ << text;
    out_.flush();
    Mirror(text);
  }

  void Err(std::string_view text) {
    err_ << text;
    err_.flush();
    Mirror(text);
  }

 private:
  void Mirror(std::string_view text) {
    if (log_.is_open()) {
      log_ << text;
      log_.flush();
    } else {
      pending_ << text;
    }
  }

  std::ostream& out_;
  std::ostream& err_;
  std::ofstream log_;
  std::ostringstream pending_;
};

// Advisory lock on the output directory; a second holder is rejected. The
// kernel drops the lock if the process dies.
class OutDirLock {
 public:
  explicit OutDirLock(const fs::path& dir) {
    const fs::path path = dir / kLockFile;
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw ResourceError("cannot create '" + path.string() + "'");
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw ResourceError("output directory '" + dir.string() +
                          "' is in use by another bitstorm process");
    }
  }
  ~OutDirLock() { ::close(fd_); }
  OutDirLock(const OutDirLock&) = delete;
  OutDirLock& operator=(const OutDirLock&) = delete;

 private:
  int fd_ = -1;
};

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::uint64_t budget = 0;
  std::size_t trials = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
};

void AddConfigOptions(CLI::App& cmd, Overrides& o, bool config_required) {
  CLI::Option* config =
      cmd.add_option("--config", o.config, "Run configuration (JSON)");
  if (config_required) config->required();
  o.seed_opt = cmd.add_option("--seed", o.seed, "Override the master seed");
  o.out_opt = cmd.add_option("--out", o.out, "Override the output directory");
  o.budget_opt = cmd.add_option("--budget", o.budget,
                                "Override the cache memory budget in bytes");
  o.trials_opt = cmd.add_option("--trials", o.trials, "Override the trial count")
                     ->check(CLI::PositiveNumber);
}

RunConfig LoadRunConfig(const Overrides& o) {
  RunConfig config = LoadConfig(o.config);
  CampaignSpec& spec = config.campaign;
  if (o.seed_opt->count() > 0) spec.seed = o.seed;
  if (o.out_opt->count() > 0) spec.out_dir = o.out;
  if (o.budget_opt->count() > 0) spec.cache_budget = o.budget;
  if (o.trials_opt->count() > 0) spec.trials = o.trials;
  ValidateCampaignSpec(spec);
  return config;
}

struct Inputs {
  RunConfig config;
  Model model;
  Dataset dataset;
};

Inputs LoadInputs(const Overrides& o) {
  Inputs in;
  in.config = LoadRunConfig(o);
  in.model = LoadModel(in.config.model_path);
  const std::vector<Shape> shapes = ValidateModel(in.model);
  in.dataset = LoadDataset(in.config.dataset_path,
                           static_cast<std::uint32_t>(NumElements(shapes.back())));
  if (in.dataset.sample_shape() != in.model.input_shape) {
    throw ValidationError(in.config.dataset_path.string() +
                          ": samples have shape " +
                          ShapeToString(in.dataset.sample_shape()) +
                          ", model expects " +
                          ShapeToString(in.model.input_shape));
  }
  return in;
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int CmdGolden(const Overrides& o, Console& console) {
  Inputs in = LoadInputs(o);
  const fs::path& out_dir = in.config.campaign.out_dir;
  console.OpenLog(out_dir);
  OutDirLock lock(out_dir);
  const PredictionSet golden = GoldenRun(in.model, in.dataset);

  Json doc;
  doc["tool"] = "bitstorm";
  doc["version"] = std::string(Version());
  doc["model_digest"] = ModelDigest(in.model);
  doc["dataset_digest"] = DatasetDigest(in.dataset);
  doc["samples"] = in.dataset.size();
  doc["predictions"] = golden.classes;
  std::ostringstream msg;
  msg << "golden run: " << in.dataset.size() << " samples\n";
  if (in.dataset.labeled()) {
    const double accuracy = Accuracy(golden.classes, in.dataset.labels);
    doc["accuracy"] = accuracy;
    msg << "accuracy vs labels: " << Fixed(accuracy) << " (chance "
        << Fixed(1.0 / in.dataset.class_count) << ")\n";
  }
  std::ofstream file(out_dir / kGoldenFile, std::ios::binary | std::ios::trunc);
  file << doc.dump(2) << '\n';
  file.close();
  if (!file) {
    throw ResourceError("cannot write '" + (out_dir / kGoldenFile).string() +
                        "'");
  }
  msg << "wrote " << (out_dir / kGoldenFile).string() << '\n';
  console.Out(msg.str());
  return kExitOk;
}

int CmdCache(const Overrides& o, Console& console) {
  Inputs in = LoadInputs(o);
  const CampaignSpec& spec = in.config.campaign;
  if (spec.mode != InjectionMode::kLayerWise) {
    throw ValidationError(
        "cache applies to layer-wise configurations only (mode is \"op\")");
  }
  console.OpenLog(spec.out_dir);
  OutDirLock lock(spec.out_dir);
  for (const CampaignTarget& target : ResolveTargets(spec, in.model)) {
    const ActivationCache cache =
        ActivationCache::Build(in.model, in.dataset, target.layer,
                               spec.cache_budget, CacheDirectory(spec, target.layer));
    std::ostringstream msg;
    msg << "layer " << target.layer << " (" << in.model.layers[target.layer].name
        << "): " << cache.sample_count() << " samples x "
        << cache.sample_bytes() << " bytes = " << cache.payload_bytes()
        << " bytes in " << cache.chunks().size() << " chunk(s) at "
        << cache.dir().string() << '\n';
    console.Out(msg.str());
  }
  return kExitOk;
}

int CmdCampaign(const Overrides& o, Console& console,
                const std::atomic<bool>* cancel) {
  Inputs in = LoadInputs(o);
  const CampaignSpec& spec = in.config.campaign;
  console.OpenLog(spec.out_dir);
  OutDirLock lock(spec.out_dir);

  CampaignOptions options;
  options.threads = 0;
  options.cancel = cancel;
  options.flush_dir = spec.out_dir;
  options.on_cell = [&](const CellResult& cell) {
    console.Out("  " + cell.target.Label(spec.mode) + " p=" +
                Fixed(cell.probability, 4) + " mean=" + Fixed(cell.mean) +
                " std=" + Fixed(cell.stddev) + '\n');
  };
  CampaignResult result;
  try {
    result = RunStochastic(spec, in.model, in.dataset, options);
  } catch (const Interrupted& e) {
    throw Interrupted(std::string(e.what()) + "; partial results in " +
                      spec.out_dir.string());
  }
  EmitReport(result, spec.out_dir);
  console.Out(FormatSummaryTable(result));
  console.Out("results written to " + spec.out_dir.string() + '\n');
  return kExitOk;
}

int CmdReport(const Overrides& o, Console& console) {
  fs::path out_dir;
  if (o.out_opt->count() > 0) {
    out_dir = o.out;
  } else if (!o.config.empty()) {
    out_dir = LoadRunConfig(o).campaign.out_dir;
  } else {
    throw ValidationError("report needs --config or --out");
  }
  const CampaignResult result = ReadSummary(out_dir / kSummaryFile);
  console.OpenLog(out_dir);
  console.Out(FormatSummaryTable(result));
  return kExitOk;
}

struct ToyOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::size_t samples = kToySamples;
  std::uint32_t classes = kToyClasses;
};

void WriteJson(const fs::path& path, const Json& doc) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << doc.dump(2) << '\n';
  file.close();
  if (!file) throw ResourceError("cannot write '" + path.string() + "'");
}

int CmdGenToy(const ToyOptions& t, Console& console) {
  const fs::path dir = t.out;
  console.OpenLog(dir);
  OutDirLock lock(dir);
  const Model cnn = MakeToyCnn(t.seed, t.classes);
  const Model prelu = MakeToyPreluCnn(t.seed, t.classes);
  const Dataset dataset = MakeToyDataset(t.seed, t.samples, t.classes);
  SaveModel(cnn, dir / "model.json", "weights.bin");
  SaveModel(prelu, dir / "prelu_model.json", "prelu_weights.bin");
  SaveDataset(dataset, dir / "data");

  const Json probabilities = {0.0, 0.25, 0.5, 0.75, 1.0};
  WriteJson(dir / "layer_campaign.json",
            {{"model", "model.json"},
             {"dataset", "data"},
             {"mode", "layer"},
             {"target", "all"},
             {"fault", "bit_flip_random"},
             {"probabilities", probabilities},
             {"trials", 100},
             {"metric", "golden_run"},
             {"seed", t.seed},
             {"out_dir", "runs/layer"}});
  WriteJson(dir / "op_campaign.json",
            {{"model", "prelu_model.json"},
             {"dataset", "data"},
             {"mode", "op"},
             {"target", {"Add", "Mul", {"Sub", "Abs"}}},
             {"fault", "bit_flip_random"},
             {"probabilities", {0.0, 0.001, 0.01}},
             {"trials", 20},
             {"metric", "ground_truth"},
             {"seed", t.seed},
             {"out_dir", "runs/op"}});

  std::ostringstream msg;
  msg << "wrote toy models, " << t.samples << " samples (" << t.classes
      << " classes) and campaign configs to " << dir.string() << '\n';
  const double chance = 1.0 / t.classes;
  msg << "golden accuracy: cnn " << Fixed(Accuracy(GoldenRun(cnn, dataset).classes, dataset.labels))
      << ", prelu " << Fixed(Accuracy(GoldenRun(prelu, dataset).classes, dataset.labels))
      << " (chance " << Fixed(chance) << ")\n";
  console.Out(msg.str());
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err, const std::atomic<bool>* cancel) {
  CLI::App app{"Fault-injection campaigns for sequential CNN inference",
               "bitstorm"};
  app.set_version_flag("--version", std::string(Version()));
  app.require_subcommand(1);

  Overrides golden_o, cache_o, campaign_o, report_o;
  CLI::App* golden = app.add_subcommand("golden", "Fault-free predictions");
  AddConfigOptions(*golden, golden_o, true);
  CLI::App* cache = app.add_subcommand("cache", "Build layer activation caches");
  AddConfigOptions(*cache, cache_o, true);
  CLI::App* campaign = app.add_subcommand("campaign", "Run a campaign");
  AddConfigOptions(*campaign, campaign_o, true);
  CLI::App* report = app.add_subcommand("report", "Print a stored summary");
  AddConfigOptions(*report, report_o, false);

  ToyOptions toy;
  CLI::App* gen_toy =
      app.add_subcommand("gen-toy", "Write the seeded toy models and dataset");
  gen_toy->add_option("--seed", toy.seed, "Master seed");
  gen_toy->add_option("--out", toy.out, "Output directory")->required();
  gen_toy->add_option("--samples", toy.samples, "Dataset size")
      ->check(CLI::PositiveNumber);
  gen_toy->add_option("--classes", toy.classes, "Class count")
      ->check(CLI::Range(2u, 1000u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  Console console(out, err);
  try {
    if (*golden) return CmdGolden(golden_o, console);
    if (*cache) return CmdCache(cache_o, console);
    if (*campaign) return CmdCampaign(campaign_o, console, cancel);
    if (*report) return CmdReport(report_o, console);
    return CmdGenToy(toy, console);
  } catch (const ValidationError& e) {
    console.Err(std::string("error: ") + e.what() + '\n');
    return kExitInvalid;
  } catch (const ResourceError& e) {
    console.Err(std::string("error: ") + e.what() + '\n');
    return kExitResource;
  } catch (const Interrupted& e) {
    console.Err(std::string("interrupted: ") + e.what() + '\n');
    return kExitInternal;
  } catch (const std::exception& e) {
    console.Err(std::string("internal error: ") + e.what() + '\n');
    return kExitInternal;
  }
}

}  // namespace bitstorm
