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

#ifndef DPFL_METRICS_IO_H_
#define DPFL_METRICS_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpfl/federation.h"

namespace dpfl {

// One JSON object per round. Non-finite values (NaN losses of skipped rounds,
// the infinite epsilon of noiseless runs) are written as null.
nlohmann::json RoundMetricsToJson(const RoundMetrics& m);
RoundMetrics RoundMetricsFromJson(const nlohmann::json& j);

// Reads a metrics.jsonl file. Throws ParseError with the line number.
std::vector<RoundMetrics> ReadMetricsFile(const std::filesystem::path& path);

// Linearly interpolated quantile (the "type 7" estimator). NaN when empty.
double Quantile(std::vector<double> values, double q);

// Shortest round-trip decimal text; empty for NaN, "inf" for +inf.
std::string FormatNumber(double v);

}  // namespace dpfl

#endif  // DPFL_METRICS_IO_H_
