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

#include "bitstorm/report.h"

#include <sstream>

#include "bitstorm/errors.h"
#include "bitstorm/toy.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace bitstorm {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;
using testing_util::ReadText;
using testing_util::ScratchDir;

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class ReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    CampaignSpec spec;
    spec.targets = {{2, {}}, {11, {}}};
    spec.probabilities = {0.0, 1.0};
    spec.trials = 4;
    spec.seed = 77;
    spec.out_dir = dir_ / "run";
    result_ = RunStochastic(spec, MakeToyCnn(2), MakeToyDataset(2, 15));
    EmitReport(result_, dir_ / "run");
  }

  ScratchDir dir_;
  CampaignResult result_;
};

TEST_F(ReportTest, CsvHeadersAndRowCounts) {
  const std::string comment = "# bitstorm " + std::string(Version()) +
                              " rng=philox4x64-10 seed=77";
  const auto acc = Lines(ReadText(dir_ / "run" / "accuracy.csv"));
  ASSERT_EQ(acc.size(), 2u + 4 * 4);
  EXPECT_EQ(acc[0], comment);
  EXPECT_EQ(acc[1], "target,probability,trial,correct,total,accuracy");
  EXPECT_EQ(acc[2], "2,0,0,15,15,1");

  const auto cma = Lines(ReadText(dir_ / "run" / "cma.csv"));
  EXPECT_EQ(cma[1], "target,probability,trial,cma");
  EXPECT_EQ(cma.size(), 2u + 16);

  const auto rec = Lines(ReadText(dir_ / "run" / "records.csv"));
  EXPECT_EQ(rec[0], comment);
  EXPECT_EQ(rec[1],
            "target,probability,trial,sample,site,element,bit,original_hex,"
            "corrupted_hex");
  EXPECT_EQ(rec.size(), 2u + 2 * 4 * 15);  // two p=1 cells
  EXPECT_THAT(rec[2], StartsWith("2,1,0,0,2,"));

  const auto layers = Lines(ReadText(dir_ / "run" / "layers.csv"));
  EXPECT_EQ(layers[1], "target,name,kind,probability,mean,std,min,max,converged");
  EXPECT_THAT(layers[2], StartsWith("2,pool1,MaxPool2D,0,1,0,1,1,"));
  EXPECT_EQ(layers.size(), 2u + 4);
}

TEST_F(ReportTest, SummaryJsonFields) {
  const auto doc = nlohmann::json::parse(ReadText(dir_ / "run" / "summary.json"));
  EXPECT_EQ(doc["tool"], "bitstorm");
  EXPECT_EQ(doc["rng"], "philox4x64-10");
  EXPECT_EQ(doc["seed"], 77);
  EXPECT_EQ(doc["mode"], "layer");
  EXPECT_EQ(doc["cells"].size(), 4u);
  EXPECT_EQ(doc["cells"][0]["std"], 0.0);
  EXPECT_EQ(doc["cells"][1]["injections"], 60);
  EXPECT_EQ(doc["records"]["count"], 120);
  EXPECT_EQ(doc["layers"][11]["kind"], "Dense");
}

TEST_F(ReportTest, SummaryRoundTrip) {
  const CampaignResult back = ReadSummary(dir_ / "run" / "summary.json");
  ASSERT_EQ(back.cells.size(), result_.cells.size());
  for (std::size_t i = 0; i < back.cells.size(); ++i) {
    EXPECT_EQ(back.cells[i].correct, result_.cells[i].correct);
    EXPECT_EQ(back.cells[i].mean, result_.cells[i].mean);
    EXPECT_EQ(back.cells[i].cma, result_.cells[i].cma);
  }
  EXPECT_EQ(back.reference_accuracy, result_.reference_accuracy);
  EXPECT_EQ(SummaryJson(back).size() > 0, true);
}

TEST_F(ReportTest, EmitIsByteStable) {
  EmitReport(result_, dir_ / "again");
  for (const char* f : {"summary.json", "accuracy.csv", "cma.csv",
                        "records.csv", "layers.csv"}) {
    EXPECT_EQ(ReadText(dir_ / "run" / f), ReadText(dir_ / "again" / f)) << f;
  }
}

TEST_F(ReportTest, TableMentionsConvergence) {
  const std::string table = FormatSummaryTable(result_);
  EXPECT_THAT(table, HasSubstr("pool1"));
  EXPECT_THAT(table, HasSubstr("not converged (insufficient trials"));
}

TEST_F(ReportTest, TamperedSummaryIsRejected) {
  auto doc = nlohmann::json::parse(ReadText(dir_ / "run" / "summary.json"));
  doc["cells"][1]["mean"] = 0.123;
  testing_util::WriteText(dir_ / "bad.json", doc.dump());
  EXPECT_THROW(ReadSummary(dir_ / "bad.json"), ValidationError);
  testing_util::WriteText(dir_ / "bad.json", "not json");
  EXPECT_THROW(ReadSummary(dir_ / "bad.json"), ValidationError);
}

TEST(VersionTest, CommentCarriesSeed) {
  EXPECT_EQ(ReportComment(5).substr(0, 11), "# bitstorm ");
  EXPECT_THAT(ReportComment(5), HasSubstr("seed=5"));
}

}  // namespace
}  // namespace bitstorm
