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

#include "dpfl/metrics_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json Finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double NumberOr(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

}  // namespace

json RoundMetricsToJson(const RoundMetrics& m) {
  json j;
  j["round"] = m.round;
  j["cohort_size"] = m.cohort_size;
  j["skipped"] = m.skipped;
  j["failed_agents"] = m.failed_agents;
  j["train_loss"] = Finite(m.train_loss);
  j["test_loss"] = Finite(m.test_loss);
  j["test_accuracy"] = Finite(m.test_accuracy);
  j["epsilon"] = Finite(m.epsilon);
  j["clip_fraction"] = m.clip_fraction;
  j["alpha_bar"] = m.alpha_bar;
  j["mean_beta"] = m.mean_beta;
  j["preclip_norms"] = m.preclip_norms;
  j["raw_norms"] = m.raw_norms;
  return j;
}

RoundMetrics RoundMetricsFromJson(const json& j) {
  RoundMetrics m;
  m.round = j.at("round").get<int>();
  m.cohort_size = j.at("cohort_size").get<int>();
  m.skipped = j.value("skipped", false);
  m.failed_agents = j.value("failed_agents", 0);
  m.train_loss = NumberOr(j, "train_loss", kNaN);
  m.test_loss = NumberOr(j, "test_loss", kNaN);
  m.test_accuracy = NumberOr(j, "test_accuracy", kNaN);
  // A missing epsilon means the run was noiseless.
  m.epsilon = NumberOr(j, "epsilon", std::numeric_limits<double>::infinity());
  m.clip_fraction = NumberOr(j, "clip_fraction", 0.0);
  m.alpha_bar = NumberOr(j, "alpha_bar", 1.0);
  m.mean_beta = NumberOr(j, "mean_beta", 1.0);
  m.preclip_norms = j.value("preclip_norms", std::vector<double>{});
  m.raw_norms = j.value("raw_norms", std::vector<double>{});
  return m;
}

std::vector<RoundMetrics> ReadMetricsFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::vector<RoundMetrics> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      rows.push_back(RoundMetricsFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                           e.what(),
                       line_no);
    }
  }
  return rows;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace dpfl
