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

// Serial reference kernels against their OpenMP forms.
//
//   ./build/bench/sgx_bench --benchmark_filter=matmul
//
// Sizes mirror the training workload: a stacked bag batch has tens of
// thousands of node rows and 32 hidden channels.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sgx/kernels.hpp"
#include "sgx/sparse.hpp"

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Block-diagonal adjacency of `graphs` random sparse graphs with ~2.2 edges
// per node, roughly the density of molecular datasets.
sgx::SparseMatrix batch_adjacency(std::size_t graphs, std::size_t nodes) {
  std::mt19937_64 rng(3);
  std::vector<sgx::SparseMatrix::Entry> e;
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
  for (std::size_t g = 0; g < graphs; ++g) {
    const int base = static_cast<int>(g * nodes);
    for (std::size_t k = 0; k < nodes + nodes / 5; ++k) {
      const int a = base + static_cast<int>(pick(rng)), b = base + static_cast<int>(pick(rng));
      if (a == b) continue;
      e.push_back({a, b, 1.0});
      e.push_back({b, a, 1.0});
    }
  }
  return sgx::SparseMatrix(graphs * nodes, graphs * nodes, e);
}

template <bool kParallel>
void BM_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 32, q = 32;
  const auto a = random_values(n * d, 1), b = random_values(d * q, 2);
  std::vector<double> out(n * q);
  for (auto _ : state) {
    if constexpr (kParallel) {
      sgx::kernels::matmul_omp(a, b, out, n, d, q);
    } else {
      sgx::kernels::matmul_serial(a, b, out, n, d, q);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n * d * q));
}

template <bool kParallel>
void BM_matmul_at_acc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 32, q = 32;
  const auto a = random_values(n * d, 1), g = random_values(n * q, 2);
  std::vector<double> out(d * q);
  for (auto _ : state) {
    if constexpr (kParallel) {
      sgx::kernels::matmul_at_acc_omp(a, g, out, n, d, q);
    } else {
      sgx::kernels::matmul_at_acc_serial(a, g, out, n, d, q);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n * d * q));
}

template <bool kParallel>
void BM_spmm(benchmark::State& state) {
  const std::size_t nodes = 18;
  const auto graphs = static_cast<std::size_t>(state.range(0));
  const auto m = batch_adjacency(graphs, nodes);
  const std::size_t w = 32;
  const auto x = random_values(m.cols() * w, 4);
  std::vector<double> out(m.rows() * w);
  for (auto _ : state) {
    std::fill(out.begin(), out.end(), 0.0);
    if constexpr (kParallel) {
      sgx::kernels::csr_spmm_acc_omp(m.csr(), x, out, w);
    } else {
      sgx::kernels::csr_spmm_acc_serial(m.csr(), x, out, w);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * m.nnz() * w));
}

}  // namespace

BENCHMARK(BM_matmul<false>)->Name("matmul/serial")->RangeMultiplier(8)->Range(512, 1 << 15);
BENCHMARK(BM_matmul<true>)->Name("matmul/omp")->RangeMultiplier(8)->Range(512, 1 << 15)->UseRealTime();
BENCHMARK(BM_matmul_at_acc<false>)->Name("matmul_at_acc/serial")->RangeMultiplier(8)->Range(512, 1 << 15);
BENCHMARK(BM_matmul_at_acc<true>)->Name("matmul_at_acc/omp")->RangeMultiplier(8)->Range(512, 1 << 15)->UseRealTime();
BENCHMARK(BM_spmm<false>)->Name("spmm/serial")->RangeMultiplier(8)->Range(32, 2048);
BENCHMARK(BM_spmm<true>)->Name("spmm/omp")->RangeMultiplier(8)->Range(32, 2048)->UseRealTime();

BENCHMARK_MAIN();
