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

#ifndef DPFL_ACCOUNTANT_H_
#define DPFL_ACCOUNTANT_H_

#include <span>
#include <vector>

namespace dpfl {

// Renyi divergence of order alpha between N(0, sigma^2) and N(1, sigma^2):
// alpha / (2 sigma^2). Throws ConfigError for alpha <= 1 or sigma <= 0.
double RdpGaussian(double sigma, double alpha);

// RDP at integer order alpha >= 2 of the Gaussian mechanism (sensitivity 1,
// noise multiplier sigma) run on a Poisson subsample with rate p:
//   (1 / (alpha - 1)) log sum_k C(alpha, k) (1-p)^(alpha-k) p^k
//                              exp((k^2 - k) / (2 sigma^2)),
// evaluated in log space. sigma == 0 yields +inf.
double RdpSubsampledGaussian(double p, double sigma, int alpha);

// Integer orders 2..512.
std::vector<int> DefaultOrders();

// Maps a requested order grid onto the supported integer grid. Orders in
// (1, 2) are clamped to 2; non-integer orders >= 2 and orders <= 1 are
// rejected with ConfigError. The result is sorted and deduplicated.
std::vector<int> NormalizeOrders(std::span<const double> orders);

// (epsilon, delta) conversion of an accumulated RDP curve:
//   min over orders of rdp(alpha) + log(1/delta) / (alpha - 1).
struct EpsilonAtOrder {
  double epsilon;
  int order;
};
EpsilonAtOrder EpsilonFromRdp(std::span<const double> rdp,
                              std::span<const int> orders, double delta);

// Composition state for a sequence of subsampled Gaussian rounds. Rounds with
// identical (p, sigma) are merged into a single entry with a count; the RDP
// curve of each entry is computed once.
class PrivacyLedger {
 public:
  struct Entry {
    double sample_prob;
    double noise_multiplier;
    long long count;
    std::vector<double> rdp;  // per order, for one round
  };

  explicit PrivacyLedger(double delta, std::vector<int> orders = DefaultOrders());

  void AddRounds(double sample_prob, double noise_multiplier,
                 long long count = 1);

  long long rounds() const { return rounds_; }
  double delta() const { return delta_; }
  const std::vector<int>& orders() const { return orders_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return rounds_ == 0; }

  // Accumulated RDP per order.
  std::vector<double> TotalRdp() const;

 private:
  double delta_;
  std::vector<int> orders_;
  std::vector<Entry> entries_;
  long long rounds_ = 0;
};

// Epsilon spent by the ledger at its delta. Throws QueryError when empty.
double ComposeAndConvert(const PrivacyLedger& ledger);
EpsilonAtOrder ComposeAndConvertWithOrder(const PrivacyLedger& ledger);

// Epsilon of `rounds` identical rounds, without building a ledger.
double EpsilonForRounds(double sample_prob, double noise_multiplier,
                        long long rounds, double delta,
                        std::span<const int> orders);

struct CalibrationResult {
  double sigma = 0.0;
  double achieved_epsilon = 0.0;
  int iterations = 0;
};

inline constexpr double kMinCalibratedSigma = 0.1;
inline constexpr double kMaxCalibratedSigma = 1e4;

// Smallest noise multiplier (to bisection tolerance) in
// [kMinCalibratedSigma, kMaxCalibratedSigma] whose composed epsilon over
// `rounds` rounds stays at or below target_epsilon. Stops once the achieved
// epsilon lies in [0.995, 1] * target. Throws CalibrationError when even
// kMaxCalibratedSigma overspends; returns kMinCalibratedSigma if it already
// meets the target.
CalibrationResult CalibrateSigma(double target_epsilon, double delta,
                                 long long rounds, double sample_prob,
                                 std::span<const int> orders);
CalibrationResult CalibrateSigma(double target_epsilon, double delta,
                                 long long rounds, double sample_prob);

}  // namespace dpfl

#endif  // DPFL_ACCOUNTANT_H_
