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

#include "dpfl/runner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dpfl/errors.h"
#include "dpfl/metrics_io.h"

namespace dpfl {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return json::parse(in);
}

std::string CellName(const std::vector<SweepAxis>& axes,
                     const std::vector<json>& values) {
  std::string name;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!name.empty()) name += "_";
    std::string v = values[i].is_string() ? values[i].get<std::string>()
                                          : values[i].dump();
    for (char& c : v) {
      if (c == '/' || c == ' ' || c == '"') c = '-';
    }
    std::string axis = axes[i].name;
    for (char& c : axis) {
      if (c == '.') c = '-';
    }
    name += axis + "-" + v;
  }
  return name.empty() ? "base" : name;
}

}  // namespace

PreparedData PrepareData(const ExperimentConfig& cfg) {
  Dataset train;
  Dataset test;
  if (cfg.data.kind == DataSourceKind::kSynthetic) {
    SyntheticSpec spec = cfg.data.synthetic;
    spec.seed = cfg.EffectiveDataSeed();
    TrainTestSplit split =
        SplitHoldout(GenerateSynthetic(spec), cfg.data.test_fraction, spec.seed);
    train = std::move(split.train);
    test = std::move(split.test);
  } else {
    Dataset all = LoadCsv(cfg.data.path);
    if (!cfg.data.test_path.empty()) {
      train = std::move(all);
      test = LoadCsv(cfg.data.test_path, CsvSchema{train.dim});
      train.num_classes = test.num_classes =
          std::max(train.num_classes, test.num_classes);
    } else {
      TrainTestSplit split =
          SplitHoldout(all, cfg.data.test_fraction, cfg.EffectiveDataSeed());
      train = std::move(split.train);
      test = std::move(split.test);
    }
  }
  PartitionSpec partition = cfg.partition;
  partition.seed = cfg.EffectivePartitionSeed();
  PreparedData out;
  out.shards = Partition(train, partition);
  out.test = std::move(test.samples);
  out.dim = train.dim;
  out.num_classes = train.num_classes;
  return out;
}

json SummaryToJson(const RunSummary& s) {
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"final_accuracy", finite(s.final_accuracy)},
          {"final_test_loss", finite(s.final_test_loss)},
          {"epsilon", finite(s.epsilon)},
          {"noise_multiplier", s.noise_multiplier},
          {"delta", s.delta},
          {"rounds", s.rounds},
          {"skipped_rounds", s.skipped_rounds},
          {"wall_seconds", s.wall_seconds},
          {"config_hash", s.config_hash},
          {"version", DPFL_VERSION}};
}

RunSummary SummaryFromJson(const json& j) {
  auto number = [&j](const char* key, double fallback) {
    return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<double>()
                                                   : fallback;
  };
  RunSummary s;
  s.final_accuracy = number("final_accuracy", kNaN);
  s.final_test_loss = number("final_test_loss", kNaN);
  s.epsilon = number("epsilon", std::numeric_limits<double>::infinity());
  s.noise_multiplier = number("noise_multiplier", 0.0);
  s.delta = number("delta", 0.0);
  s.rounds = j.value("rounds", 0);
  s.skipped_rounds = j.value("skipped_rounds", 0);
  s.wall_seconds = number("wall_seconds", 0.0);
  s.config_hash = j.value("config_hash", std::string());
  return s;
}

RunSummary RunToDirectory(const ExperimentConfig& cfg, const fs::path& out_dir) {
  ValidateConfig(cfg);
  const auto start = std::chrono::steady_clock::now();
  const PreparedData data = PrepareData(cfg);
  const MlpSpec spec = cfg.ModelSpec(data.dim, data.num_classes);
  const FederationConfig fed = cfg.Federation();

  fs::create_directories(out_dir);
  const fs::path metrics_path = out_dir / "metrics.jsonl";
  std::ofstream metrics(metrics_path, std::ios::binary | std::ios::trunc);
  if (!metrics) throw DataError("cannot write " + metrics_path.string());

  const ExperimentResult result = RunExperiment(
      spec, fed, data.shards, data.test, [&metrics](const RoundMetrics& m) {
        metrics << RoundMetricsToJson(m).dump() << '\n';
        metrics.flush();
      });
  metrics.close();

  RunSummary summary;
  summary.noise_multiplier = result.noise_multiplier;
  summary.delta = fed.dp.delta;
  summary.rounds = cfg.train.rounds;
  summary.config_hash = ConfigHash(cfg);
  if (!result.metrics.empty()) {
    const RoundMetrics& last = result.metrics.back();
    summary.final_accuracy = last.test_accuracy;
    summary.final_test_loss = last.test_loss;
    summary.epsilon = last.epsilon;
  } else {
    const EvalResult eval = Evaluate(result.model, data.test);
    summary.final_accuracy = data.test.empty() ? kNaN : eval.accuracy;
    summary.final_test_loss = data.test.empty() ? kNaN : eval.loss;
    summary.epsilon = 0.0;
  }
  for (const RoundMetrics& m : result.metrics) summary.skipped_rounds += m.skipped ? 1 : 0;

  std::string events;
  for (const std::string& e : result.events) events += e + "\n";
  WriteFile(out_dir / "events.log", events);

  json resolved = {{"config", ToJson(cfg)},
                   {"resolved",
                    {{"noise_multiplier", result.noise_multiplier},
                     {"delta", fed.dp.delta},
                     {"seed", cfg.seed},
                     {"layer_sizes", spec.layer_sizes},
                     {"agents", data.shards.size()},
                     {"test_samples", data.test.size()}}},
                   {"config_hash", summary.config_hash},
                   {"version", DPFL_VERSION}};
  WriteFile(out_dir / "config.json", resolved.dump(2) + "\n");

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  WriteFile(out_dir / "summary.json", SummaryToJson(summary).dump(2) + "\n");
  return summary;
}

SweepAxis ParseSweepAxis(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ConfigError("sweep axis '" + spec + "': expected name=v1,v2,...");
  }
  SweepAxis axis;
  axis.name = spec.substr(0, eq);
  std::stringstream values(spec.substr(eq + 1));
  std::string token;
  while (std::getline(values, token, ',')) {
    if (token.empty()) throw ConfigError("sweep axis '" + spec + "': empty value");
    try {
      axis.values.push_back(json::parse(token));
    } catch (const json::parse_error&) {
      axis.values.push_back(json(token));
    }
  }
  return axis;
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const std::vector<SweepAxis>& axes,
                               const fs::path& out_dir, std::ostream* log) {
  for (const SweepAxis& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep axis " + a.name + " has no values");
  }
  // Expand and validate every cell before running any of them.
  std::vector<std::pair<std::vector<json>, ExperimentConfig>> cells;
  std::size_t total = 1;
  for (const SweepAxis& a : axes) total *= a.values.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    // Mixed-radix decode; the last axis varies fastest.
    std::vector<json> values(axes.size());
    std::size_t rest = flat;
    for (std::size_t i = axes.size(); i-- > 0;) {
      values[i] = axes[i].values[rest % axes[i].values.size()];
      rest /= axes[i].values.size();
    }
    ExperimentConfig cell = base;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      cell = WithOverride(cell, axes[i].name, values[i]);
    }
    cells.emplace_back(std::move(values), std::move(cell));
  }

  fs::create_directories(out_dir);
  std::vector<SweepRow> rows;
  for (auto& [values, cell] : cells) {
    SweepRow row;
    row.cell = CellName(axes, values);
    row.values = values;
    const fs::path cell_dir = out_dir / row.cell;
    cell.name = row.cell;
    cell.output_dir = cell_dir.string();
    const std::string hash = ConfigHash(cell);
    const fs::path summary_path = cell_dir / "summary.json";
    if (fs::exists(summary_path)) {
      try {
        RunSummary previous = SummaryFromJson(ReadJsonFile(summary_path));
        if (previous.config_hash == hash) {
          row.summary = previous;
          row.resumed = true;
        }
      } catch (const std::exception&) {
        // Unreadable summary: rerun the cell.
      }
    }
    if (!row.resumed) {
      if (log != nullptr) *log << "sweep: running " << row.cell << "\n";
      row.summary = RunToDirectory(cell, cell_dir);
    } else if (log != nullptr) {
      *log << "sweep: " << row.cell << " already complete, skipped\n";
    }
    row.baseline = cell.blur.lambda == 0.0 && cell.sparsity.sparsity == 0.0;
    rows.push_back(std::move(row));
  }

  double baseline_acc = kNaN;
  for (const SweepRow& r : rows) {
    if (r.baseline) {
      baseline_acc = r.summary.final_accuracy;
      break;
    }
  }
  std::ostringstream csv;
  csv << "cell";
  for (const SweepAxis& a : axes) csv << "," << a.name;
  csv << ",final_accuracy,final_test_loss,epsilon,noise_multiplier,gain,baseline,"
         "status\n";
  for (SweepRow& r : rows) {
    r.gain = r.summary.final_accuracy - baseline_acc;
    csv << r.cell;
    for (const json& v : r.values) csv << "," << (v.is_string() ? v.get<std::string>() : v.dump());
    csv << "," << FormatNumber(r.summary.final_accuracy) << ","
        << FormatNumber(r.summary.final_test_loss) << ","
        << FormatNumber(r.summary.epsilon) << ","
        << FormatNumber(r.summary.noise_multiplier) << "," << FormatNumber(r.gain)
        << "," << (r.baseline ? "yes" : "no") << ","
        << (r.resumed ? "skipped" : "ran") << "\n";
  }
  WriteFile(out_dir / "sweep.csv", csv.str());
  return rows;
}

fs::path WriteReport(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<std::pair<std::string, fs::path>> runs;
  if (fs::exists(dir / "metrics.jsonl")) runs.emplace_back(".", dir / "metrics.jsonl");
  std::vector<fs::path> subdirs;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "metrics.jsonl")) {
      subdirs.push_back(e.path());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const fs::path& p : subdirs) {
    runs.emplace_back(p.filename().string(), p / "metrics.jsonl");
  }
  if (runs.empty()) throw DataError("no metrics.jsonl found under " + dir.string());

  std::ostringstream csv;
  csv << "run,round,cohort_size,skipped,norm_min,norm_q10,norm_q25,norm_median,"
         "norm_q75,norm_q90,norm_max,clip_fraction,alpha_bar,mean_beta,"
         "train_loss,test_loss,test_accuracy,epsilon\n";
  std::size_t total_rows = 0;
  for (const auto& [name, path] : runs) {
    for (const RoundMetrics& m : ReadMetricsFile(path)) {
      ++total_rows;
      csv << name << "," << m.round << "," << m.cohort_size << ","
          << (m.skipped ? 1 : 0);
      for (double q : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        csv << "," << FormatNumber(Quantile(m.preclip_norms, q));
      }
      csv << "," << FormatNumber(m.clip_fraction) << ","
          << FormatNumber(m.alpha_bar) << "," << FormatNumber(m.mean_beta) << ","
          << FormatNumber(m.train_loss) << "," << FormatNumber(m.test_loss) << ","
          << FormatNumber(m.test_accuracy) << "," << FormatNumber(m.epsilon)
          << "\n";
    }
  }
  if (total_rows == 0) throw DataError("metrics files under " + dir.string() + " are empty");
  const fs::path out = dir / "report.csv";
  WriteFile(out, csv.str());
  return out;
}

}  // namespace dpfl
