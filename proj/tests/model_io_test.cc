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

#include "bitstorm/model_io.h"

#include "bitstorm/errors.h"
#include "bitstorm/toy.h"
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
using Json = nlohmann::json;

bool SameModel(const Model& a, const Model& b) {
  return ModelDigest(a) == ModelDigest(b);
}

TEST(ModelIoTest, RoundTripPreservesEveryBit) {
  ScratchDir dir;
  for (const Model& model : {MakeToyCnn(9), MakeToyPreluCnn(9)}) {
    SaveModel(model, dir / "m.json");
    const Model loaded = LoadModel(dir / "m.json");
    EXPECT_TRUE(SameModel(model, loaded));
    ASSERT_EQ(loaded.layers.size(), model.layers.size());
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      EXPECT_EQ(loaded.layers[i].name, model.layers[i].name);
      EXPECT_EQ(loaded.layers[i].kind(), model.layers[i].kind());
    }
    const Dataset data = MakeToyDataset(9, 3);
    for (const Tensor& x : data.samples) {
      EXPECT_TRUE(Forward(model, x).BitEquals(Forward(loaded, x)));
    }
  }
}

TEST(ModelIoTest, SaveIsByteStable) {
  ScratchDir dir;
  SaveModel(MakeToyCnn(4), dir / "a.json", "a.bin");
  SaveModel(MakeToyCnn(4), dir / "b.json", "b.bin");
  EXPECT_EQ(ReadText(dir / "a.bin"), ReadText(dir / "b.bin"));
  Json a = Json::parse(ReadText(dir / "a.json"));
  a["weights"] = "b.bin";
  EXPECT_EQ(a, Json::parse(ReadText(dir / "b.json")));
}

TEST(ModelIoTest, DigestSensitiveToWeightBits) {
  Model a = MakeToyCnn(4);
  Model b = a;
  std::get<DenseParams>(b.layers[9].params).bias[0] += 1e-7f;
  EXPECT_NE(ModelDigest(a), ModelDigest(b));
  EXPECT_EQ(ModelDigest(a).size(), 16u);
}

class ManifestErrorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SaveModel(MakeToyCnn(2), dir_ / "model.json");
    manifest_ = Json::parse(ReadText(dir_ / "model.json"));
  }

  std::string LoadError() {
    WriteText(dir_ / "model.json", manifest_.dump());
    try {
      LoadModel(dir_ / "model.json");
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "";
  }

  ScratchDir dir_;
  Json manifest_;
};

TEST_F(ManifestErrorTest, LengthMismatchNamesField) {
  manifest_["layers"][3]["kind"] = "Conv2D";
  manifest_["layers"][3]["kernel"] = manifest_["layers"][0]["kernel"];
  manifest_["layers"][3]["kernel"]["length"] = 12;
  EXPECT_THAT(LoadError(), HasSubstr("layers[3].kernel.length"));
}

TEST_F(ManifestErrorTest, RangeOutsideBlob) {
  manifest_["layers"][0]["bias"]["offset"] = 1 << 30;
  EXPECT_THAT(LoadError(), HasSubstr("layers[0].bias"));
}

TEST_F(ManifestErrorTest, MissingField) {
  manifest_["layers"][9].erase("weights");
  EXPECT_THAT(LoadError(), HasSubstr("layers[9].weights"));
}

TEST_F(ManifestErrorTest, UnknownKind) {
  manifest_["layers"][2]["kind"] = "AvgPool2D";
  EXPECT_THAT(LoadError(), HasSubstr("layers[2].kind"));
}

TEST_F(ManifestErrorTest, WrongFormat) {
  manifest_["format"] = "keras";
  EXPECT_THAT(LoadError(), HasSubstr("format"));
}

TEST_F(ManifestErrorTest, ShapeMismatchNamesProducer) {
  manifest_["input_shape"] = {16, 16, 4};
  EXPECT_THAT(LoadError(), HasSubstr("layer 0"));
}

TEST(ModelIoTest, SyntaxErrorReportsPosition) {
  ScratchDir dir;
  WriteText(dir / "bad.json", "{\n  \"format\": \n}");
  try {
    LoadModel(dir / "bad.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_THAT(e.what(), HasSubstr("line 3"));
  }
}

TEST(ModelIoTest, MissingFilesNamePath) {
  ScratchDir dir;
  try {
    LoadModel(dir / "absent.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_THAT(e.what(), HasSubstr("absent.json"));
  }
  SaveModel(MakeToyCnn(1), dir / "m.json");
  std::filesystem::remove(dir / "weights.bin");
  try {
    LoadModel(dir / "m.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_THAT(e.what(), HasSubstr("weights.bin"));
  }
}

}  // namespace
}  // namespace bitstorm
