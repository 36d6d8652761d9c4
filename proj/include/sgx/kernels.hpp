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

#include <cstddef>
#include <span>

#include "sgx/sparse.hpp"

// Dense and sparse product kernels behind the autodiff ops.
//
// Every kernel comes in a serial reference form and an OpenMP form. The
// OpenMP forms split work over output rows only and keep the per-element
// accumulation order of the serial form, so both produce bit-identical
// results. The dispatching entry points pick the parallel path only for large
// products outside an enclosing parallel region.
namespace sgx::kernels {

// out[n x q] = a[n x d] * b[d x q]
void matmul_serial(std::span<const double> a, std::span<const double> b, std::span<double> out,
                   std::size_t n, std::size_t d, std::size_t q);
void matmul_omp(std::span<const double> a, std::span<const double> b, std::span<double> out,
                std::size_t n, std::size_t d, std::size_t q);
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out,
            std::size_t n, std::size_t d, std::size_t q);

// out[n x d] += g[n x q] * b[d x q]^T
void matmul_bt_acc_serial(std::span<const double> g, std::span<const double> b,
                          std::span<double> out, std::size_t n, std::size_t d, std::size_t q);
void matmul_bt_acc_omp(std::span<const double> g, std::span<const double> b,
                       std::span<double> out, std::size_t n, std::size_t d, std::size_t q);
void matmul_bt_acc(std::span<const double> g, std::span<const double> b, std::span<double> out,
                   std::size_t n, std::size_t d, std::size_t q);

// out[d x q] += a[n x d]^T * g[n x q]
void matmul_at_acc_serial(std::span<const double> a, std::span<const double> g,
                          std::span<double> out, std::size_t n, std::size_t d, std::size_t q);
void matmul_at_acc_omp(std::span<const double> a, std::span<const double> g,
                       std::span<double> out, std::size_t n, std::size_t d, std::size_t q);
void matmul_at_acc(std::span<const double> a, std::span<const double> g, std::span<double> out,
                   std::size_t n, std::size_t d, std::size_t q);

// out[rows x w] += M * x[cols x w] for a CSR matrix M.
void csr_spmm_acc_serial(const Csr& m, std::span<const double> x, std::span<double> out,
                         std::size_t w);
void csr_spmm_acc_omp(const Csr& m, std::span<const double> x, std::span<double> out,
                      std::size_t w);
void csr_spmm_acc(const Csr& m, std::span<const double> x, std::span<double> out, std::size_t w);

// out[n x w] += A_w * x where A_w has pattern (row_ptr, col) and entry p
// carries weight w[slot[p]].
void pattern_spmm_acc(std::span<const std::size_t> row_ptr, std::span<const int> col,
                      std::span<const int> slot, std::span<const double> weights,
                      std::span<const double> x, std::span<double> out, std::size_t w);

// Work (multiply-adds) above which the dispatchers go parallel.
inline constexpr std::size_t kParallelWork = 1u << 16;

}  // namespace sgx::kernels
