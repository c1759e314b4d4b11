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

#include "dpfl/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxOrder = 512;

void CheckSampleProb(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ConfigError("sample probability must lie in (0, 1]");
  }
}

void CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
}

}  // namespace

double RdpGaussian(double sigma, double alpha) {
  if (!(alpha > 1.0)) throw ConfigError("Renyi order must exceed 1");
  if (!(sigma > 0.0)) throw ConfigError("noise multiplier must be positive");
  if (std::isinf(sigma)) return 0.0;
  return alpha / (2.0 * sigma * sigma);
}

double RdpSubsampledGaussian(double p, double sigma, int alpha) {
  CheckSampleProb(p);
  if (alpha < 2) throw ConfigError("subsampled RDP needs integer order >= 2");
  if (!(sigma >= 0.0)) throw ConfigError("noise multiplier must be >= 0");
  if (sigma == 0.0) return kInf;
  if (p == 1.0) return RdpGaussian(sigma, alpha);
  if (std::isinf(sigma)) return 0.0;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> terms(static_cast<std::size_t>(alpha) + 1);
  double log_binom = 0.0;  // log C(alpha, k)
  double max_term = -kInf;
  for (int k = 0; k <= alpha; ++k) {
    if (k > 0) {
      log_binom += std::log(static_cast<double>(alpha - k + 1)) -
                   std::log(static_cast<double>(k));
    }
    const double kd = static_cast<double>(k);
    const double t = log_binom + static_cast<double>(alpha - k) * log_q +
                     kd * log_p + (kd * kd - kd) * inv_two_var;
    terms[static_cast<std::size_t>(k)] = t;
    max_term = std::max(max_term, t);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  const double log_moment = max_term + std::log(sum);
  return std::max(0.0, log_moment / static_cast<double>(alpha - 1));
}

std::vector<int> DefaultOrders() {
  std::vector<int> orders;
  for (int a = 2; a <= kMaxOrder; ++a) orders.push_back(a);
  return orders;
}

std::vector<int> NormalizeOrders(std::span<const double> orders) {
  std::vector<int> out;
  for (double a : orders) {
    if (!(a > 1.0)) throw ConfigError("Renyi orders must exceed 1");
    if (a < 2.0) {
      out.push_back(2);
      continue;
    }
    if (a != std::floor(a) || a > kMaxOrder) {
      throw ConfigError("Renyi orders >= 2 must be integers <= 512, got " +
                        std::to_string(a));
    }
    out.push_back(static_cast<int>(a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw ConfigError("Renyi order grid is empty");
  return out;
}

EpsilonAtOrder EpsilonFromRdp(std::span<const double> rdp,
                              std::span<const int> orders, double delta) {
  CheckDelta(delta);
  if (rdp.size() != orders.size() || orders.empty()) {
    throw ConfigError("RDP curve does not match the order grid");
  }
  EpsilonAtOrder best{kInf, orders.front()};
  const double log_inv_delta = -std::log(delta);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double eps =
        rdp[i] + log_inv_delta / static_cast<double>(orders[i] - 1);
    if (eps < best.epsilon) best = {eps, orders[i]};
  }
  return best;
}

PrivacyLedger::PrivacyLedger(double delta, std::vector<int> orders)
    : delta_(delta), orders_(std::move(orders)) {
  CheckDelta(delta_);
  if (orders_.empty()) throw ConfigError("Renyi order grid is empty");
  for (int a : orders_) {
    if (a < 2) throw ConfigError("ledger orders must be integers >= 2");
  }
}

void PrivacyLedger::AddRounds(double sample_prob, double noise_multiplier,
                              long long count) {
  CheckSampleProb(sample_prob);
  if (count < 0) throw ConfigError("round count must be >= 0");
  if (count == 0) return;
  for (Entry& e : entries_) {
    if (e.sample_prob == sample_prob && e.noise_multiplier == noise_multiplier) {
      e.count += count;
      rounds_ += count;
      return;
    }
  }
  Entry entry{sample_prob, noise_multiplier, count, {}};
  entry.rdp.reserve(orders_.size());
  for (int a : orders_) {
    entry.rdp.push_back(RdpSubsampledGaussian(sample_prob, noise_multiplier, a));
  }
  entries_.push_back(std::move(entry));
  rounds_ += count;
}

std::vector<double> PrivacyLedger::TotalRdp() const {
  std::vector<double> total(orders_.size(), 0.0);
  for (const Entry& e : entries_) {
    for (std::size_t i = 0; i < total.size(); ++i) {
      total[i] += static_cast<double>(e.count) * e.rdp[i];
    }
  }
  return total;
}

EpsilonAtOrder ComposeAndConvertWithOrder(const PrivacyLedger& ledger) {
  if (ledger.empty()) throw QueryError("privacy ledger has no rounds");
  const std::vector<double> total = ledger.TotalRdp();
  return EpsilonFromRdp(total, ledger.orders(), ledger.delta());
}

double ComposeAndConvert(const PrivacyLedger& ledger) {
  return ComposeAndConvertWithOrder(ledger).epsilon;
}

double EpsilonForRounds(double sample_prob, double noise_multiplier,
                        long long rounds, double delta,
                        std::span<const int> orders) {
  std::vector<double> rdp;
  rdp.reserve(orders.size());
  for (int a : orders) {
    rdp.push_back(static_cast<double>(rounds) *
                  RdpSubsampledGaussian(sample_prob, noise_multiplier, a));
  }
  return EpsilonFromRdp(rdp, orders, delta).epsilon;
}

CalibrationResult CalibrateSigma(double target_epsilon, double delta,
                                 long long rounds, double sample_prob,
                                 std::span<const int> orders) {
  if (!(target_epsilon > 0.0) || !std::isfinite(target_epsilon)) {
    throw ConfigError("target epsilon must be finite and > 0");
  }
  CheckDelta(delta);
  CheckSampleProb(sample_prob);
  if (rounds < 1) throw ConfigError("rounds must be >= 1");

  auto eps_at = [&](double sigma) {
    return EpsilonForRounds(sample_prob, sigma, rounds, delta, orders);
  };
  double lo = kMinCalibratedSigma;
  double hi = kMaxCalibratedSigma;
  double eps_hi = eps_at(hi);
  int iterations = 1;
  if (eps_hi > target_epsilon) {
    throw CalibrationError(
        "target epsilon " + std::to_string(target_epsilon) +
        " is unreachable with noise multiplier <= 1e4 (best " +
        std::to_string(eps_hi) + ")");
  }
  const double eps_lo = eps_at(lo);
  ++iterations;
  if (eps_lo <= target_epsilon) return {lo, eps_lo, iterations};

  // Invariant: eps(lo) > target >= eps(hi). eps is non-increasing in sigma.
  constexpr int kMaxIterations = 200;
  while (eps_hi < 0.995 * target_epsilon && iterations < kMaxIterations) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    const double eps_mid = eps_at(mid);
    ++iterations;
    if (eps_mid <= target_epsilon) {
      hi = mid;
      eps_hi = eps_mid;
    } else {
      lo = mid;
    }
  }
  return {hi, eps_hi, iterations};
}

CalibrationResult CalibrateSigma(double target_epsilon, double delta,
                                 long long rounds, double sample_prob) {
  const std::vector<int> orders = DefaultOrders();
  return CalibrateSigma(target_epsilon, delta, rounds, sample_prob, orders);
}

}  // namespace dpfl
