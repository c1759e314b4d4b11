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

#ifndef DPFL_PARAM_VECTOR_H_
#define DPFL_PARAM_VECTOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dpfl {

// Flat float64 storage split into named layers. Holds model weights, local
// updates, gradients and utility costs; every binary operation requires an
// identical layout and throws ConfigError otherwise.
class ParamVector {
 public:
  struct LayerInfo {
    std::string name;
    std::size_t size;
    bool operator==(const LayerInfo&) const = default;
  };

  ParamVector() = default;
  // Zero-filled vector with the given layer layout.
  explicit ParamVector(std::vector<LayerInfo> layers);
  // Single unnamed layer holding `values`.
  static ParamVector FromValues(std::vector<double> values);
  // Zero vector with the same layout as `other`.
  static ParamVector ZerosLike(const ParamVector& other);

  std::size_t dim() const { return values_.size(); }
  std::size_t num_layers() const { return layers_.size(); }
  const LayerInfo& layer_info(std::size_t j) const { return layers_[j]; }
  std::size_t layer_offset(std::size_t j) const { return offsets_[j]; }

  std::span<double> layer(std::size_t j) {
    return {values_.data() + offsets_[j], layers_[j].size};
  }
  std::span<const double> layer(std::size_t j) const {
    return {values_.data() + offsets_[j], layers_[j].size};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool SameLayout(const ParamVector& other) const;
  // Throws ConfigError naming `what` when layouts differ.
  void RequireSameLayout(const ParamVector& other, const char* what) const;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double scale);
  // this += scale * other
  ParamVector& Axpy(double scale, const ParamVector& other);
  ParamVector& HadamardInPlace(const ParamVector& other);

  double Dot(const ParamVector& other) const;
  double SquaredNorm() const;
  double Norm() const;
  bool AllFinite() const;

  bool operator==(const ParamVector& other) const = default;

 private:
  std::vector<LayerInfo> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator*(double scale, ParamVector a);
ParamVector Hadamard(ParamVector a, const ParamVector& b);

}  // namespace dpfl

#endif  // DPFL_PARAM_VECTOR_H_
