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

#include <filesystem>

#include <nlohmann/json.hpp>

#include "sgx/optim.hpp"

namespace sgx {

// Checkpoint container:
//   {"format": "sgx-checkpoint", "version": 1,
//    "tensors": {"<name>": {"shape": [rows, cols], "values": [row-major reals]}}}
// Reals are written in shortest round-trip form, so save/load is bit-exact.
nlohmann::json checkpoint_to_json(const NamedTensors& params);
// Copies stored values into the tensors of `params` by name. Every name in
// `params` must be present with a matching shape (FormatError otherwise).
void checkpoint_from_json(const nlohmann::json& j, const NamedTensors& params);

void save_checkpoint(const NamedTensors& params, const std::filesystem::path& path);
void load_checkpoint(const std::filesystem::path& path, const NamedTensors& params);

// Prepends "<prefix>/" to each name.
NamedTensors with_prefix(const NamedTensors& params, const std::string& prefix);

}  // namespace sgx
