// Copyright 2026 The dpfl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpfl/config.h"

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

using nlohmann::json;

json MinimalJson() {
  return json{{"dp", {{"clip", 0.3}, {"target_epsilon", 4.0}, {"sample_prob", 0.2}}}};
}

std::string ErrorOf(const json& j) {
  try {
    ParseConfig(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, DefaultsFillIn) {
  const ExperimentConfig c = ParseConfig(MinimalJson());
  EXPECT_EQ(c.partition.agents, 100);
  EXPECT_EQ(c.model.hidden, std::vector<std::size_t>{32});
  EXPECT_DOUBLE_EQ(c.blur.lambda, 0.4);
  EXPECT_DOUBLE_EQ(c.sparsity.sparsity, 0.7);
  EXPECT_DOUBLE_EQ(c.EffectiveDelta(), 0.01);
  EXPECT_EQ(c.ModelSpec(20, 5).layer_sizes, (std::vector<std::size_t>{20, 32, 5}));
}

TEST(ConfigTest, SingleAgentDeltaFallback) {
  json j = MinimalJson();
  j["partition"] = {{"agents", 1}};
  EXPECT_DOUBLE_EQ(ParseConfig(j).EffectiveDelta(), 1e-5);
  j["dp"]["delta"] = 1e-3;
  EXPECT_DOUBLE_EQ(ParseConfig(j).EffectiveDelta(), 1e-3);
}

TEST(ConfigTest, RoundTripThroughJson) {
  json j = MinimalJson();
  j["seed"] = 17;
  j["partition"] = {{"scheme", "iid"}, {"agents", 12}, {"seed", 3}};
  j["model"] = {{"hidden", {8, 4}}, {"activation", "identity"}, {"loss", "squared_error"}};
  j["dp"]["clip"] = "inf";
  const ExperimentConfig c = ParseConfig(j);
  EXPECT_TRUE(std::isinf(c.dp.clip_threshold));
  EXPECT_EQ(ToJson(c)["dp"]["clip"], "inf");
  EXPECT_EQ(ParseConfig(ToJson(c)), c);
  EXPECT_EQ(ConfigHash(ParseConfig(ToJson(c))), ConfigHash(c));
}

TEST(ConfigTest, UnknownFieldNamesPath) {
  json j = MinimalJson();
  j["train"] = {{"learning_rate", 0.1}};
  EXPECT_NE(ErrorOf(j).find("train.learning_rate"), std::string::npos);
  j = MinimalJson();
  j["bogus"] = 1;
  EXPECT_NE(ErrorOf(j).find("bogus"), std::string::npos);
}

TEST(ConfigTest, TypeMismatchNamesPath) {
  json j = MinimalJson();
  j["train"] = {{"local_lr", "fast"}};
  EXPECT_NE(ErrorOf(j).find("train.local_lr"), std::string::npos);
  j = MinimalJson();
  j["train"] = {{"rounds", 2.5}};
  EXPECT_NE(ErrorOf(j).find("train.rounds"), std::string::npos);
}

TEST(ConfigTest, CrossFieldConstraints) {
  json j = MinimalJson();
  j["blur"] = {{"lambda", 2.0}};
  j["train"] = {{"local_lr", 1.0}};
  EXPECT_NE(ErrorOf(j).find("lambda * local_lr must be < 1"), std::string::npos);

  j = MinimalJson();
  j["dp"]["noise_multiplier"] = 1.0;
  EXPECT_NE(ErrorOf(j), "");
  j = MinimalJson();
  j["dp"].erase("target_epsilon");
  EXPECT_NE(ErrorOf(j), "");
  j = MinimalJson();
  j["dp"]["sample_prob"] = 1.5;
  EXPECT_NE(ErrorOf(j).find("sample_prob"), std::string::npos);
  j = MinimalJson();
  j["sparsity"] = {{"c", 1.0}};
  EXPECT_NE(ErrorOf(j).find("sparsity"), std::string::npos);
  j = MinimalJson();
  j["data"] = {{"source", "csv"}};
  EXPECT_NE(ErrorOf(j).find("data.path"), std::string::npos);
}

TEST(ConfigTest, OverridesByAliasAndPath) {
  const ExperimentConfig base = ParseConfig(MinimalJson());
  EXPECT_DOUBLE_EQ(WithOverride(base, "lambda", 0.05).blur.lambda, 0.05);
  EXPECT_DOUBLE_EQ(WithOverride(base, "c", 0.3).sparsity.sparsity, 0.3);
  EXPECT_EQ(WithOverride(base, "train.batch_size", 7).train.batch_size, 7);
  const ExperimentConfig sigma = WithOverride(base, "sigma", 1.5);
  EXPECT_EQ(sigma.dp.noise_multiplier, 1.5);
  EXPECT_FALSE(sigma.dp.target_epsilon.has_value());
  EXPECT_THROW(WithOverride(base, "train.nope", 1), ConfigError);
  EXPECT_THROW(WithOverride(base, "lambda", 100.0), ConfigError);
}

TEST(ConfigTest, HashIgnoresLocationButNotContent) {
  const ExperimentConfig a = ParseConfig(MinimalJson());
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  b.name = "other";
  b.train.parallel = false;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.seed = 99;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
}

TEST(ConfigTest, FederationCopiesResolvedFields) {
  json j = MinimalJson();
  j["seed"] = 5;
  const FederationConfig f = ParseConfig(j).Federation();
  EXPECT_EQ(f.train.seed, 5u);
  EXPECT_DOUBLE_EQ(f.dp.delta, 0.01);
  EXPECT_DOUBLE_EQ(f.blur.lambda, 0.4);
}

}  // namespace
}  // namespace dpfl
