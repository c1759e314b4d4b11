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

#ifndef DPFL_NN_H_
#define DPFL_NN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpfl/param_vector.h"

namespace dpfl {

// One labelled example. `target` is only read by the squared-error loss; when
// empty, the one-hot encoding of `label` is used instead.
struct Sample {
  std::vector<double> features;
  int label = 0;
  std::vector<double> target;

  bool operator==(const Sample&) const = default;
};

enum class Activation { kIdentity, kRelu };
enum class LossKind { kSoftmaxCrossEntropy, kSquaredError };

std::string ToString(Activation a);
std::string ToString(LossKind l);
Activation ParseActivation(const std::string& s);
LossKind ParseLossKind(const std::string& s);

// Dense network shape. layer_sizes = {input, hidden..., classes}; the
// activation applies after every hidden layer, the output layer is linear.
struct MlpSpec {
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::kRelu;
  LossKind loss = LossKind::kSoftmaxCrossEntropy;

  bool operator==(const MlpSpec&) const = default;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  std::size_t num_dense() const { return layer_sizes.size() - 1; }
  // Throws ConfigError for fewer than two sizes or a zero size.
  void Validate() const;
  // Layer layout: for each dense layer l, "dense<l>.weight" (row-major,
  // out x in) followed by "dense<l>.bias".
  std::vector<ParamVector::LayerInfo> Layout() const;
};

struct MlpModel {
  MlpSpec spec;
  ParamVector params;

  // Weights and biases drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static MlpModel Initialize(const MlpSpec& spec, std::uint64_t seed);
  static MlpModel Zeros(const MlpSpec& spec);
};

// Output-layer values (logits for cross-entropy) for one input.
std::vector<double> Forward(const MlpModel& model, std::span<const double> x);

// Mean per-sample loss over the batch. The batch is a list of pointers so
// that with-replacement minibatches do not copy samples.
double ForwardLoss(const MlpModel& model, std::span<const Sample* const> batch);
double ForwardLoss(const MlpModel& model, std::span<const Sample> batch);

struct LossAndGradient {
  double loss = 0.0;
  ParamVector gradient;
};

// Exact gradient of ForwardLoss by reverse-mode accumulation. Per-sample
// contributions are summed in batch order, so results are bit-reproducible.
LossAndGradient LossGradient(const MlpModel& model,
                             std::span<const Sample* const> batch);
LossAndGradient LossGradient(const MlpModel& model, std::span<const Sample> batch);
ParamVector Backward(const MlpModel& model, std::span<const Sample* const> batch);
ParamVector Backward(const MlpModel& model, std::span<const Sample> batch);

int Predict(const MlpModel& model, std::span<const double> x);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Mean loss and top-1 accuracy. The parallel variant splits samples across
// OpenMP threads but sums per-sample losses serially, so both return the same
// bits.
EvalResult Evaluate(const MlpModel& model, std::span<const Sample> samples);
EvalResult EvaluateParallel(const MlpModel& model,
                            std::span<const Sample> samples);

}  // namespace dpfl

#endif  // DPFL_NN_H_
