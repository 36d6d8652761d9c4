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

#include "sgx/kernels.hpp"

#include <omp.h>

namespace sgx::kernels {
namespace {

bool go_parallel(std::size_t work) {
  return work >= kParallelWork && !omp_in_parallel() && omp_get_max_threads() > 1;
}

inline void matmul_row(const double* a, const double* b, double* o, std::size_t d, std::size_t q) {
  for (std::size_t j = 0; j < q; ++j) o[j] = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double aik = a[k];
    if (aik == 0.0) continue;
    const double* bk = b + k * q;
    for (std::size_t j = 0; j < q; ++j) o[j] += aik * bk[j];
  }
}

inline void matmul_bt_row(const double* g, const double* b, double* o, std::size_t d, std::size_t q) {
  for (std::size_t k = 0; k < d; ++k) {
    const double* bk = b + k * q;
    double s = 0.0;
    for (std::size_t j = 0; j < q; ++j) s += g[j] * bk[j];
    o[k] += s;
  }
}

inline void csr_row(const Csr& m, std::size_t r, const double* x, double* o, std::size_t w) {
  for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
    const double v = m.val[p];
    const double* xr = x + static_cast<std::size_t>(m.col[p]) * w;
    for (std::size_t j = 0; j < w; ++j) o[j] += v * xr[j];
  }
}

}  // namespace

void matmul_serial(std::span<const double> a, std::span<const double> b, std::span<double> out,
                   std::size_t n, std::size_t d, std::size_t q) {
  for (std::size_t i = 0; i < n; ++i) matmul_row(a.data() + i * d, b.data(), out.data() + i * q, d, q);
}

void matmul_omp(std::span<const double> a, std::span<const double> b, std::span<double> out,
                std::size_t n, std::size_t d, std::size_t q) {
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    matmul_row(a.data() + r * d, b.data(), out.data() + r * q, d, q);
  }
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out,
            std::size_t n, std::size_t d, std::size_t q) {
  if (go_parallel(n * d * q)) {
    matmul_omp(a, b, out, n, d, q);
  } else {
    matmul_serial(a, b, out, n, d, q);
  }
}

void matmul_bt_acc_serial(std::span<const double> g, std::span<const double> b,
                          std::span<double> out, std::size_t n, std::size_t d, std::size_t q) {
  for (std::size_t i = 0; i < n; ++i) matmul_bt_row(g.data() + i * q, b.data(), out.data() + i * d, d, q);
}

void matmul_bt_acc_omp(std::span<const double> g, std::span<const double> b,
                       std::span<double> out, std::size_t n, std::size_t d, std::size_t q) {
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    matmul_bt_row(g.data() + r * q, b.data(), out.data() + r * d, d, q);
  }
}

void matmul_bt_acc(std::span<const double> g, std::span<const double> b, std::span<double> out,
                   std::size_t n, std::size_t d, std::size_t q) {
  if (go_parallel(n * d * q)) {
    matmul_bt_acc_omp(g, b, out, n, d, q);
  } else {
    matmul_bt_acc_serial(g, b, out, n, d, q);
  }
}

void matmul_at_acc_serial(std::span<const double> a, std::span<const double> g,
                          std::span<double> out, std::size_t n, std::size_t d, std::size_t q) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data() + i * d;
    const double* gi = g.data() + i * q;
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      double* o = out.data() + k * q;
      for (std::size_t j = 0; j < q; ++j) o[j] += aik * gi[j];
    }
  }
}

void matmul_at_acc_omp(std::span<const double> a, std::span<const double> g,
                       std::span<double> out, std::size_t n, std::size_t d, std::size_t q) {
  // Each thread owns a contiguous block of output rows and streams over i in
  // ascending order, so every element sums in the serial order.
#pragma omp parallel
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t k0 = d * t / nt, k1 = d * (t + 1) / nt;
    for (std::size_t i = 0; i < n && k0 < k1; ++i) {
      const double* ai = a.data() + i * d;
      const double* gi = g.data() + i * q;
      for (std::size_t k = k0; k < k1; ++k) {
        const double aik = ai[k];
        if (aik == 0.0) continue;
        double* o = out.data() + k * q;
        for (std::size_t j = 0; j < q; ++j) o[j] += aik * gi[j];
      }
    }
  }
}

void matmul_at_acc(std::span<const double> a, std::span<const double> g, std::span<double> out,
                   std::size_t n, std::size_t d, std::size_t q) {
  if (go_parallel(n * d * q)) {
    matmul_at_acc_omp(a, g, out, n, d, q);
  } else {
    matmul_at_acc_serial(a, g, out, n, d, q);
  }
}

void csr_spmm_acc_serial(const Csr& m, std::span<const double> x, std::span<double> out,
                         std::size_t w) {
  const std::size_t rows = m.row_ptr.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) csr_row(m, r, x.data(), out.data() + r * w, w);
}

void csr_spmm_acc_omp(const Csr& m, std::span<const double> x, std::span<double> out,
                      std::size_t w) {
  const auto rows = static_cast<std::ptrdiff_t>(m.row_ptr.size() - 1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    csr_row(m, r, x.data(), out.data() + r * w, w);
  }
}

void csr_spmm_acc(const Csr& m, std::span<const double> x, std::span<double> out, std::size_t w) {
  if (go_parallel(m.col.size() * w)) {
    csr_spmm_acc_omp(m, x, out, w);
  } else {
    csr_spmm_acc_serial(m, x, out, w);
  }
}

void pattern_spmm_acc(std::span<const std::size_t> row_ptr, std::span<const int> col,
                      std::span<const int> slot, std::span<const double> weights,
                      std::span<const double> x, std::span<double> out, std::size_t w) {
  const std::size_t rows = row_ptr.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    double* o = out.data() + r * w;
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      const double v = weights[static_cast<std::size_t>(slot[p])];
      if (v == 0.0) continue;
      const double* xr = x.data() + static_cast<std::size_t>(col[p]) * w;
      for (std::size_t j = 0; j < w; ++j) o[j] += v * xr[j];
    }
  }
}

}  // namespace sgx::kernels
