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

#ifndef DPFL_RUNNER_H_
#define DPFL_RUNNER_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpfl/config.h"
#include "dpfl/data.h"
#include "dpfl/federation.h"

namespace dpfl {

struct PreparedData {
  std::vector<AgentShard> shards;
  std::vector<Sample> test;
  std::size_t dim = 0;
  int num_classes = 0;
};

// Generates or loads the dataset, splits off the test set and partitions the
// training set across agents.
PreparedData PrepareData(const ExperimentConfig& cfg);

struct RunSummary {
  double final_accuracy = 0.0;
  double final_test_loss = 0.0;
  double epsilon = 0.0;
  double noise_multiplier = 0.0;
  double delta = 0.0;
  int rounds = 0;
  int skipped_rounds = 0;
  double wall_seconds = 0.0;
  std::string config_hash;
};

nlohmann::json SummaryToJson(const RunSummary& s);
RunSummary SummaryFromJson(const nlohmann::json& j);

// Runs one experiment and writes into out_dir:
//   config.json    resolved config, resolved sigma/delta, version, hash
//   metrics.jsonl  one RoundMetrics object per round
//   events.log     skipped rounds, failed agents
//   summary.json   final accuracy, epsilon spent, wall time
// metrics.jsonl is byte-identical across reruns of the same config.
RunSummary RunToDirectory(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir);

struct SweepAxis {
  std::string name;
  std::vector<nlohmann::json> values;
};

// "lambda=0,0.4" -> {"lambda", [0, 0.4]}. Values are parsed as JSON scalars.
SweepAxis ParseSweepAxis(const std::string& spec);

struct SweepRow {
  std::string cell;
  std::vector<nlohmann::json> values;
  RunSummary summary;
  bool baseline = false;  // lambda == 0 and sparsity == 0
  bool resumed = false;   // summary reused from a previous sweep
  double gain = 0.0;      // accuracy minus baseline accuracy; NaN without one
};

// Runs the Cartesian product of the axes over `base` (same seed in every
// cell) into out_dir/<cell>/ and writes out_dir/sweep.csv. A cell whose
// summary.json carries the same config hash is not rerun.
std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const std::vector<SweepAxis>& axes,
                               const std::filesystem::path& out_dir,
                               std::ostream* log = nullptr);

// Tabulates every metrics.jsonl found in dir or its immediate subdirectories
// into dir/report.csv: per round, quantiles of the pre-clip norms, clip
// diagnostics, test accuracy/loss and cumulative epsilon. Throws DataError
// when no metrics exist.
std::filesystem::path WriteReport(const std::filesystem::path& dir);

}  // namespace dpfl

#endif  // DPFL_RUNNER_H_
