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

#include "sgx/optim.hpp"

#include <cmath>

#include "sgx/errors.hpp"

namespace sgx {

void zero_grads(const NamedTensors& params) {
  for (const auto& [name, t] : params) Tensor(t).zero_grad();
}

void set_requires_grad(const NamedTensors& params, bool on) {
  for (const auto& [name, t] : params) Tensor(t).set_requires_grad(on);
}

FrozenScope::FrozenScope(NamedTensors params) : params_(std::move(params)) {
  previous_.reserve(params_.size());
  for (auto& [name, t] : params_) {
    previous_.push_back(t.requires_grad());
    t.set_requires_grad(false);
  }
}

FrozenScope::~FrozenScope() {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i].second.set_requires_grad(previous_[i]);
}

Tensor init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = dist(rng);
  return Tensor::from(rows, cols, std::move(v), true);
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                 const AdamConfig& cfg, const std::string& name) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw TrainingError("non-finite gradient for parameter '" + name + "'");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads.empty() ? 0.0 : grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

Adam::Adam(NamedTensors params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg), state_(params_.size()) {}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor t = params_[i].second;
    adam_update(t.mutable_values(), t.grad(), state_[i], cfg_, params_[i].first);
  }
}

}  // namespace sgx
