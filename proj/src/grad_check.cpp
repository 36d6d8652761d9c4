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

#include "sgx/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "sgx/errors.hpp"

namespace sgx {

GradCheckResult grad_check(const std::function<Tensor()>& f, const NamedTensors& params, double h) {
  if (!(h >= 1e-6 && h <= 1e-4)) throw ArgumentError("grad_check step must lie in [1e-6, 1e-4]");
  zero_grads(params);
  const Tensor root = f();
  if (!std::isfinite(root.item())) throw OracleError("objective is not finite at the check point");
  Tape(root).backward();

  GradCheckResult result;
  for (const auto& [name, t] : params) {
    Tensor p = t;
    std::vector<double> analytic(p.size(), 0.0);
    if (!p.grad().empty()) std::copy(p.grad().begin(), p.grad().end(), analytic.begin());
    auto values = p.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x0 = values[i];
      values[i] = x0 + h;
      const double fp = f().item();
      values[i] = x0 - h;
      const double fm = f().item();
      values[i] = x0;
      if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(analytic[i])) {
        throw OracleError("non-finite value while checking " + name + "[" + std::to_string(i) + "]");
      }
      const double numeric = (fp - fm) / (2.0 * h);
      const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
      ++result.coordinates;
      if (err > result.max_rel_error || result.worst_param.empty()) {
        if (err >= result.max_rel_error) {
          result.max_rel_error = err;
          result.worst_param = name;
          result.worst_index = i;
        }
      }
    }
  }
  return result;
}

}  // namespace sgx
