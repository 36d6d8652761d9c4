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

#include <doctest.h>

#include <omp.h>

#include <random>
#include <vector>

#include "sgx/graph.hpp"
#include "sgx/kernels.hpp"
#include "sgx/sparse.hpp"

using namespace sgx;

namespace {

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, std::size_t nnz, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> r(0, static_cast<int>(rows) - 1), c(0, static_cast<int>(cols) - 1);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  std::vector<SparseMatrix::Entry> e;
  for (std::size_t i = 0; i < nnz; ++i) e.push_back({r(rng), c(rng), w(rng)});
  return SparseMatrix(rows, cols, e);
}

struct ThreadGuard {
  int previous = omp_get_max_threads();
  explicit ThreadGuard(int n) { omp_set_num_threads(n); }
  ~ThreadGuard() { omp_set_num_threads(previous); }
};

}  // namespace

TEST_CASE("parallel dense kernels are bit-identical to the serial reference") {
  ThreadGuard threads(4);
  std::mt19937_64 rng(7);
  for (auto [n, d, q] : {std::array<std::size_t, 3>{1, 1, 1}, {37, 13, 32}, {513, 32, 32}, {64, 64, 2}}) {
    CAPTURE(n);
    CAPTURE(d);
    CAPTURE(q);
    const auto a = random_values(n * d, rng);
    const auto b = random_values(d * q, rng);
    const auto g = random_values(n * q, rng);
    std::vector<double> s(n * q), p(n * q);
    kernels::matmul_serial(a, b, s, n, d, q);
    kernels::matmul_omp(a, b, p, n, d, q);
    CHECK(s == p);

    std::vector<double> s2 = random_values(n * d, rng), p2 = s2;
    kernels::matmul_bt_acc_serial(g, b, s2, n, d, q);
    kernels::matmul_bt_acc_omp(g, b, p2, n, d, q);
    CHECK(s2 == p2);

    std::vector<double> s3(d * q, 0.5), p3(d * q, 0.5);
    kernels::matmul_at_acc_serial(a, g, s3, n, d, q);
    kernels::matmul_at_acc_omp(a, g, p3, n, d, q);
    CHECK(s3 == p3);

    std::vector<double> dispatch(n * q);
    kernels::matmul(a, b, dispatch, n, d, q);
    CHECK(dispatch == s);
  }
}

TEST_CASE("serial matmul matches a naive triple loop") {
  std::mt19937_64 rng(8);
  const std::size_t n = 5, d = 4, q = 3;
  const auto a = random_values(n * d, rng);
  const auto b = random_values(d * q, rng);
  std::vector<double> out(n * q);
  kernels::matmul_serial(a, b, out, n, d, q);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[i * d + k] * b[k * q + j];
      CHECK(out[i * q + j] == doctest::Approx(s).epsilon(1e-14));
    }
  }
}

TEST_CASE("parallel sparse kernel is bit-identical and agrees with the dense product") {
  ThreadGuard threads(4);
  std::mt19937_64 rng(9);
  const std::size_t rows = 300, cols = 200, w = 16;
  const SparseMatrix m = random_sparse(rows, cols, 2000, rng);
  const auto x = random_values(cols * w, rng);
  std::vector<double> s(rows * w), p(rows * w);
  kernels::csr_spmm_acc_serial(m.csr(), x, s, w);
  kernels::csr_spmm_acc_omp(m.csr(), x, p, w);
  CHECK(s == p);

  const auto dense = m.to_dense();
  std::vector<double> ref(rows * w);
  kernels::matmul_serial(dense, x, ref, rows, cols, w);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-12));

  // transpose storage is the transpose
  std::vector<double> t(cols * rows, 0.0);
  const auto& tc = m.csr_transposed();
  for (std::size_t r = 0; r < cols; ++r) {
    for (std::size_t k = tc.row_ptr[r]; k < tc.row_ptr[r + 1]; ++k) {
      t[r * rows + static_cast<std::size_t>(tc.col[k])] += tc.val[k];
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) CHECK(t[j * rows + i] == dense[i * cols + j]);
  }
}

TEST_CASE("sparse matrix sums duplicates and validates indices") {
  const std::vector<SparseMatrix::Entry> e{{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}};
  const SparseMatrix m(2, 2, e);
  CHECK(m.nnz() == 2);
  CHECK(m.to_dense() == std::vector<double>{0, 3, 1, 0});
  CHECK_FALSE(m.is_symmetric());
  CHECK(SparseMatrix::identity(3).is_symmetric());
}
