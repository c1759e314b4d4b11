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

// Command-line front end: run, calibrate, sweep, report.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or
// arguments.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpfl/accountant.h"
#include "dpfl/config.h"
#include "dpfl/errors.h"
#include "dpfl/metrics_io.h"
#include "dpfl/runner.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr const char* kOutDirEnv = "DPFL_OUT_DIR";

// --out beats the environment, which beats the config file.
fs::path ResolveOutDir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return from_config;
}

dpfl::ExperimentConfig LoadWithSeed(const std::string& path,
                                    const std::optional<std::uint64_t>& seed) {
  dpfl::ExperimentConfig cfg = dpfl::LoadConfigFile(path);
  if (seed.has_value()) cfg.seed = *seed;
  return cfg;
}

int CmdRun(const std::string& config_path, const std::string& out_flag,
           const std::optional<std::uint64_t>& seed, bool as_json) {
  const dpfl::ExperimentConfig cfg = LoadWithSeed(config_path, seed);
  const fs::path out = ResolveOutDir(out_flag, cfg.output_dir);
  const dpfl::RunSummary s = dpfl::RunToDirectory(cfg, out);
  if (as_json) {
    json j = dpfl::SummaryToJson(s);
    j["output_dir"] = out.string();
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "run complete: " << out.string() << "\n"
              << "  final accuracy   " << dpfl::FormatNumber(s.final_accuracy) << "\n"
              << "  epsilon spent    " << dpfl::FormatNumber(s.epsilon)
              << " (delta " << dpfl::FormatNumber(s.delta) << ")\n"
              << "  noise multiplier " << dpfl::FormatNumber(s.noise_multiplier) << "\n"
              << "  wall time        " << s.wall_seconds << " s\n";
  }
  return kExitOk;
}

int CmdCalibrate(double epsilon, double delta, long long rounds, double p,
                 bool as_json) {
  const dpfl::CalibrationResult r = dpfl::CalibrateSigma(epsilon, delta, rounds, p);
  if (as_json) {
    std::cout << json{{"sigma", r.sigma},
                      {"achieved_epsilon", r.achieved_epsilon},
                      {"iterations", r.iterations},
                      {"target_epsilon", epsilon},
                      {"delta", delta},
                      {"rounds", rounds},
                      {"sample_prob", p}}
                     .dump()
              << "\n";
  } else {
    std::cout << "sigma            " << dpfl::FormatNumber(r.sigma) << "\n"
              << "achieved epsilon " << dpfl::FormatNumber(r.achieved_epsilon) << "\n"
              << "iterations       " << r.iterations << "\n";
  }
  return kExitOk;
}

int CmdSweep(const std::string& config_path, const std::vector<std::string>& grid,
             const std::string& out_flag, const std::optional<std::uint64_t>& seed) {
  const dpfl::ExperimentConfig cfg = LoadWithSeed(config_path, seed);
  std::vector<dpfl::SweepAxis> axes;
  for (const std::string& g : grid) axes.push_back(dpfl::ParseSweepAxis(g));
  const fs::path out = ResolveOutDir(out_flag, cfg.output_dir);
  const std::vector<dpfl::SweepRow> rows = dpfl::RunSweep(cfg, axes, out, &std::cerr);
  std::cout << "cell,final_accuracy,epsilon,gain,baseline,status\n";
  for (const dpfl::SweepRow& r : rows) {
    std::cout << r.cell << "," << dpfl::FormatNumber(r.summary.final_accuracy) << ","
              << dpfl::FormatNumber(r.summary.epsilon) << ","
              << dpfl::FormatNumber(r.gain) << "," << (r.baseline ? "yes" : "no")
              << "," << (r.resumed ? "skipped" : "ran") << "\n";
  }
  std::cerr << "sweep table written to " << (out / "sweep.csv").string() << "\n";
  return kExitOk;
}

int CmdReport(const std::string& dir) {
  const fs::path out = dpfl::WriteReport(dir);
  std::cout << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool as_json = false;

  CLI::App* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config and $DPFL_OUT_DIR)");
  run->add_option("--seed", seed, "Override the experiment seed");
  run->add_flag("--json", as_json, "Print the summary as JSON");

  double epsilon = 0.0;
  double delta = 1e-5;
  long long rounds = 0;
  double sample_prob = 1.0;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Noise multiplier for a target (epsilon, delta)");
  calibrate->add_option("--epsilon", epsilon, "Target epsilon")->required();
  calibrate->add_option("--delta", delta, "Target delta")->required();
  calibrate->add_option("--rounds", rounds, "Number of rounds T")->required();
  calibrate->add_option("--sample-prob", sample_prob, "Agent sampling probability p")
      ->required();
  calibrate->add_flag("--json", as_json, "Machine-readable output");

  std::vector<std::string> grid;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a hyperparameter grid");
  sweep->add_option("--config", config_path, "Base experiment config (JSON)")->required();
  sweep->add_option("--grid", grid, "Axis as name=v1,v2 (repeatable)")->required();
  sweep->add_option("--out", out_dir, "Sweep output directory");
  sweep->add_option("--seed", seed, "Override the experiment seed");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "Tabulate metrics into CSV");
  report->add_option("dir", report_dir, "Run or sweep directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return CmdRun(config_path, out_dir, seed, as_json);
    if (*calibrate) return CmdCalibrate(epsilon, delta, rounds, sample_prob, as_json);
    if (*sweep) return CmdSweep(config_path, grid, out_dir, seed);
    if (*report) return CmdReport(report_dir);
  } catch (const dpfl::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
