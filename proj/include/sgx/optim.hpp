// Copyright 2026 The sgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgx/tensor.hpp"

namespace sgx {

// Named view over model tensors. Entries alias the model's tensors, so
// optimizer updates land in the model.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void zero_grads(const NamedTensors& params);
void set_requires_grad(const NamedTensors& params, bool on);

// Turns gradient tracking off for `params` until destruction, restoring the
// previous flags afterwards.
class FrozenScope {
 public:
  explicit FrozenScope(NamedTensors params);
  ~FrozenScope();
  FrozenScope(const FrozenScope&) = delete;
  FrozenScope& operator=(const FrozenScope&) = delete;

 private:
  NamedTensors params_;
  std::vector<bool> previous_;
};

// PyTorch-style default initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Tensor init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, std::mt19937_64& rng);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

// One bias-corrected Adam step on a flat parameter array. Throws
// TrainingError naming `name` when a gradient is not finite.
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                 const AdamConfig& cfg, const std::string& name = "param");

class Adam {
 public:
  Adam(NamedTensors params, AdamConfig cfg);
  // Applies one update from the current gradients. Tensors without a
  // gradient (never reached by backward) are treated as having zero gradient.
  void step();
  void zero_grad() { zero_grads(params_); }
  const AdamConfig& config() const { return cfg_; }

 private:
  NamedTensors params_;
  AdamConfig cfg_;
  std::vector<AdamState> state_;
};

}  // namespace sgx
