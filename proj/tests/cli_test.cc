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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
};

Result RunCli(const std::string& args) {
  const std::string cmd = std::string(DPFL_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("dpfl_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path WriteConfig(const std::string& body) {
    const fs::path p = dir_ / "config.json";
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

constexpr const char* kTiny = R"({
  "seed": 2,
  "data": {"classes": 3, "dim": 4, "per_class": 20},
  "partition": {"agents": 5},
  "model": {"hidden": [4]},
  "train": {"local_steps": 2, "rounds": 2, "batch_size": 4},
  "dp": {"clip": 0.5, "target_epsilon": 4, "sample_prob": 0.6}
})";

TEST_F(CliTest, RunTwiceGivesIdenticalMetrics) {
  const fs::path cfg = WriteConfig(kTiny);
  const Result a = RunCli("run --config " + cfg.string() + " --out " + (dir_ / "a").string());
  ASSERT_EQ(a.code, 0) << a.out;
  const Result b = RunCli("run --config " + cfg.string() + " --out " + (dir_ / "b").string());
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_TRUE(fs::exists(dir_ / "a" / "summary.json"));
  EXPECT_EQ(Slurp(dir_ / "a" / "metrics.jsonl"), Slurp(dir_ / "b" / "metrics.jsonl"));
}

TEST_F(CliTest, ExampleConfigIsValid) {
  const Result r = RunCli("run --config " DPFL_SOURCE_DIR "/configs/example.json --seed 1 "
                          "--out " + (dir_ / "example").string() + " --json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("final_accuracy"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "example" / "summary.json"));
}

TEST_F(CliTest, InvalidConfigExitsTwoNamingConstraint) {
  const fs::path cfg = WriteConfig(R"({"blur": {"lambda": 2}, "train": {"local_lr": 1},
      "dp": {"clip": 1, "noise_multiplier": 1}})");
  const Result r = RunCli("run --config " + cfg.string() + " --out " + (dir_ / "x").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("lambda * local_lr must be < 1"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(dir_ / "x" / "metrics.jsonl"));
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli("").code, 2);
  EXPECT_EQ(RunCli("run").code, 2);
  EXPECT_EQ(RunCli("frobnicate").code, 2);
}

TEST_F(CliTest, Calibrate) {
  const Result r = RunCli("calibrate --epsilon 4 --delta 0.01 --rounds 100 --sample-prob 0.2 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"sigma\""), std::string::npos);
  const Result bad = RunCli("calibrate --epsilon 1e-6 --delta 1e-10 --rounds 100000 --sample-prob 1");
  EXPECT_EQ(bad.code, 1);
}

TEST_F(CliTest, SweepAndReport) {
  const fs::path cfg = WriteConfig(kTiny);
  const Result s = RunCli("sweep --config " + cfg.string() + " --grid lambda=0,0.4 --grid c=0,0.7 --out " +
                          (dir_ / "sweep").string());
  ASSERT_EQ(s.code, 0) << s.out;
  EXPECT_NE(s.out.find("yes"), std::string::npos);
  const Result r = RunCli("report " + (dir_ / "sweep").string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "sweep" / "report.csv"));
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(RunCli("report " + (dir_ / "empty").string()).code, 1);
}

TEST_F(CliTest, OutDirFromEnvironment) {
  const fs::path cfg = WriteConfig(kTiny);
  const std::string env = "DPFL_OUT_DIR=" + (dir_ / "env").string() + " ";
  const std::string cmd = env + DPFL_CLI_PATH + " run --config " + cfg.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "env" / "summary.json"));
}

}  // namespace
