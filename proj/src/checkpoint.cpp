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

#include "sgx/checkpoint.hpp"

#include <cmath>

#include "sgx/errors.hpp"
#include "sgx/io.hpp"

namespace sgx {

nlohmann::json checkpoint_to_json(const NamedTensors& params) {
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, t] : params) {
    for (double v : t.values()) {
      if (!std::isfinite(v)) throw TrainingError("cannot checkpoint non-finite value in '" + name + "'");
    }
    tensors[name] = {{"shape", {t.rows(), t.cols()}},
                     {"values", std::vector<double>(t.values().begin(), t.values().end())}};
  }
  return {{"format", "sgx-checkpoint"}, {"version", 1}, {"tensors", std::move(tensors)}};
}

void checkpoint_from_json(const nlohmann::json& j, const NamedTensors& params) {
  if (j.value("format", "") != "sgx-checkpoint") throw FormatError("not an sgx checkpoint");
  const auto& tensors = j.at("tensors");
  for (const auto& [name, t] : params) {
    if (!tensors.contains(name)) throw FormatError("checkpoint lacks tensor '" + name + "'");
    const auto& e = tensors.at(name);
    const auto shape = e.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 2 || shape[0] != t.rows() || shape[1] != t.cols()) {
      throw FormatError("checkpoint tensor '" + name + "' has a different shape");
    }
    const auto values = e.at("values").get<std::vector<double>>();
    if (values.size() != t.size()) throw FormatError("checkpoint tensor '" + name + "' is truncated");
    Tensor dst = t;
    std::copy(values.begin(), values.end(), dst.mutable_values().begin());
  }
}

void save_checkpoint(const NamedTensors& params, const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_to_json(params).dump());
}

void load_checkpoint(const std::filesystem::path& path, const NamedTensors& params) {
  checkpoint_from_json(nlohmann::json::parse(read_file(path)), params);
}

NamedTensors with_prefix(const NamedTensors& params, const std::string& prefix) {
  NamedTensors out;
  out.reserve(params.size());
  for (const auto& [name, t] : params) out.emplace_back(prefix + "/" + name, t);
  return out;
}

}  // namespace sgx
