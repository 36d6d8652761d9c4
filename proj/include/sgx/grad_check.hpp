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

#include <functional>
#include <string>

#include "sgx/optim.hpp"
#include "sgx/tensor.hpp"

namespace sgx {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

// Compares reverse-mode gradients of the scalar `f` with respect to every
// entry of `params` against central differences with step h:
//   err = |analytic - (f(x+h) - f(x-h)) / 2h| / max(1, |analytic|).
// `f` must rebuild its graph from the current parameter values on each call.
// Throws ArgumentError for h outside [1e-6, 1e-4] and OracleError on
// non-finite values.
GradCheckResult grad_check(const std::function<Tensor()>& f, const NamedTensors& params,
                           double h = 1e-5);

}  // namespace sgx
