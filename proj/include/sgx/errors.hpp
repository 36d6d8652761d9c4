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

#include <stdexcept>
#include <string>

namespace sgx {

// Base of every error thrown by the library. `kind()` is a short stable tag
// ("dimension", "format", ...) used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SGX_DEFINE_ERROR(Name, tag)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(tag, what) {}     \
  };

SGX_DEFINE_ERROR(DimensionError, "dimension")
SGX_DEFINE_ERROR(ArgumentError, "argument")
SGX_DEFINE_ERROR(IngestionError, "ingestion")
SGX_DEFINE_ERROR(FormatError, "format")
SGX_DEFINE_ERROR(PolicyError, "policy")
SGX_DEFINE_ERROR(TrainingError, "training")
SGX_DEFINE_ERROR(OracleError, "oracle")
SGX_DEFINE_ERROR(DataError, "data")
SGX_DEFINE_ERROR(SplitError, "split")
SGX_DEFINE_ERROR(IoError, "io")

#undef SGX_DEFINE_ERROR

// Wraps an error raised inside one pipeline stage so the stage name travels
// with the cause.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace sgx
