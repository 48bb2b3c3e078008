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

#include <atomic>
#include <sstream>

#include "bitstorm/report.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace bitstorm {
namespace {

using ::testing::HasSubstr;
using testing_util::ReadText;
using testing_util::ScratchDir;
using testing_util::WriteText;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args,
           const std::atomic<bool>* cancel = nullptr) {
  args.insert(args.begin(), "bitstorm");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err, cancel);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Small toy workspace with a layer-wise config trimmed for test speed.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const CliRun r = Cli({"gen-toy", "--seed", "3", "--samples", "10",
                          "--out", dir_.path().string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }

  std::filesystem::path Config(const nlohmann::json& patch) {
    nlohmann::json doc = nlohmann::json::parse(ReadText(dir_ / "layer_campaign.json"));
    doc.merge_patch(patch);
    const auto path = dir_ / ("cfg_" + std::to_string(configs_++) + ".json");
    WriteText(path, doc.dump());
    return path;
  }

  ScratchDir dir_;
  int configs_ = 0;
};

TEST_F(CliTest, GenToyIsDeterministic) {
  ScratchDir other;
  ASSERT_EQ(Cli({"gen-toy", "--seed", "3", "--samples", "10", "--out",
                 other.path().string()})
                .code,
            kExitOk);
  for (const char* f : {"model.json", "weights.bin", "prelu_model.json",
                        "prelu_weights.bin", "data/samples.bin",
                        "data/labels.bin", "layer_campaign.json",
                        "op_campaign.json"}) {
    EXPECT_EQ(ReadText(dir_ / f), ReadText(other / f)) << f;
    EXPECT_FALSE(ReadText(dir_ / f).empty()) << f;
  }
}

TEST_F(CliTest, GoldenWritesStableFile) {
  const auto cfg = Config({{"out_dir", "g"}});
  const CliRun first = Cli({"golden", "--config", cfg.string()});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  EXPECT_THAT(first.out, HasSubstr("golden run: 10 samples"));
  const std::string text = ReadText(dir_ / "g" / "golden.json");
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["samples"], 10);
  EXPECT_EQ(doc["predictions"].size(), 10u);
  EXPECT_THAT(ReadText(dir_ / "g" / "run.log"), HasSubstr("golden run"));
  ASSERT_EQ(Cli({"golden", "--config", cfg.string()}).code, kExitOk);
  EXPECT_EQ(ReadText(dir_ / "g" / "golden.json"), text);
}

TEST_F(CliTest, MissingDatasetIsInvalid) {
  const CliRun r = Cli({"golden", "--config",
                        Config({{"dataset", "nowhere"}}).string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_THAT(r.err, HasSubstr("nowhere"));
}

TEST_F(CliTest, BadConfigKeyIsInvalid) {
  const CliRun r = Cli({"campaign", "--config",
                        Config({{"trails", 3}}).string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_THAT(r.err, HasSubstr("'trails'"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, kExitInvalid);
  EXPECT_EQ(Cli({"explode"}).code, kExitInvalid);
  EXPECT_EQ(Cli({"campaign"}).code, kExitInvalid);
  EXPECT_EQ(Cli({"gen-toy", "--out", "x", "--classes", "1"}).code, kExitInvalid);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  const CliRun v = Cli({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_THAT(v.out, HasSubstr(std::string(Version())));
}

TEST_F(CliTest, CacheReportsPayload) {
  const CliRun r = Cli({"cache", "--config",
                        Config({{"target", 3}, {"out_dir", "c"}}).string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("layer 3 (dropout1): 10 samples x 2048 bytes = "
                               "20480 bytes in 1 chunk(s)"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "c" / "cache" / "layer_3"));
}

TEST_F(CliTest, CacheBudgetBelowOneActivationIsResourceError) {
  const CliRun r = Cli({"cache", "--budget", "100", "--config",
                        Config({{"target", 3}, {"out_dir", "c"}}).string()});
  EXPECT_EQ(r.code, kExitResource);
  EXPECT_THAT(r.err, HasSubstr("budget"));
}

TEST_F(CliTest, CacheRejectsOperationWiseConfig) {
  const CliRun r = Cli({"cache", "--config", (dir_ / "op_campaign.json").string()});
  EXPECT_EQ(r.code, kExitInvalid);
}

TEST_F(CliTest, CampaignAtZeroMatchesReferenceThenReports) {
  const auto cfg = Config({{"target", {0, 11}},
                           {"probabilities", {0}},
                           {"trials", 3},
                           {"metric", "ground_truth"},
                           {"out_dir", "z"}});
  const CliRun r = Cli({"campaign", "--config", cfg.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("results written to"));
  const CampaignResult result = ReadSummary(dir_ / "z" / "summary.json");
  ASSERT_EQ(result.cells.size(), 2u);
  for (const CellResult& cell : result.cells) {
    EXPECT_EQ(cell.mean, result.reference_accuracy);
    EXPECT_EQ(cell.stddev, 0.0);
  }
  EXPECT_THAT(ReadText(dir_ / "z" / "run.log"), HasSubstr("results written"));

  const CliRun report = Cli({"report", "--out", (dir_ / "z").string()});
  ASSERT_EQ(report.code, kExitOk) << report.err;
  EXPECT_THAT(report.out, HasSubstr("conv1"));
  EXPECT_EQ(Cli({"report", "--config", cfg.string()}).code, kExitOk);
  EXPECT_EQ(Cli({"report"}).code, kExitInvalid);
}

TEST_F(CliTest, OverridesApply) {
  const auto cfg = Config({{"target", 11}, {"probabilities", {1}},
                           {"trials", 50}});
  const CliRun r = Cli({"campaign", "--config", cfg.string(), "--trials", "2",
                        "--seed", "9", "--out", (dir_ / "ov").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const CampaignResult result = ReadSummary(dir_ / "ov" / "summary.json");
  EXPECT_EQ(result.trials, 2u);
  EXPECT_EQ(result.seed, 9u);
  EXPECT_EQ(Cli({"campaign", "--config", cfg.string(), "--trials", "0"}).code,
            kExitInvalid);
}

TEST_F(CliTest, LockedOutputDirectoryIsRejected) {
  const auto out = dir_ / "locked";
  std::filesystem::create_directories(out);
  const int fd = ::open((out / ".bitstorm.lock").c_str(), O_CREAT | O_RDWR, 0644);
  ASSERT_GE(fd, 0);
  ASSERT_EQ(::flock(fd, LOCK_EX | LOCK_NB), 0);
  const CliRun r = Cli({"golden", "--config",
                        Config({{"out_dir", "locked"}}).string()});
  EXPECT_EQ(r.code, kExitResource);
  EXPECT_THAT(r.err, HasSubstr("in use"));
  ::close(fd);
  EXPECT_EQ(Cli({"golden", "--config",
                 Config({{"out_dir", "locked"}}).string()})
                .code,
            kExitOk);
}

TEST_F(CliTest, CancelledCampaignLeavesPartialSummary) {
  std::atomic<bool> cancel{true};
  const CliRun r = Cli({"campaign", "--config",
                        Config({{"out_dir", "cx"}}).string()},
                       &cancel);
  EXPECT_EQ(r.code, kExitInternal);
  EXPECT_THAT(r.err, HasSubstr("interrupted"));
  const CampaignResult partial = ReadSummary(dir_ / "cx" / "summary.json");
  EXPECT_FALSE(partial.complete);
}

}  // namespace
}  // namespace bitstorm
