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
#include <vector>

namespace sgx {

// Compressed sparse row storage for one orientation of a matrix.
struct Csr {
  std::vector<std::size_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;
};

// Rectangular sparse matrix in CSR form. The transpose is built once at
// construction so backward products (D^T g) are row gathers as well, which
// keeps every kernel free of scatter races.
class SparseMatrix {
 public:
  struct Entry {
    int row = 0;
    int col = 0;
    double weight = 0.0;
  };

  SparseMatrix() = default;
  // Duplicate (row, col) entries are summed. Throws DimensionError on
  // out-of-range indices.
  SparseMatrix(std::size_t rows, std::size_t cols, std::span<const Entry> entries);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return fwd_.col.size(); }

  const Csr& csr() const { return fwd_; }
  const Csr& csr_transposed() const { return bwd_; }

  std::vector<Entry> entries() const;
  std::vector<double> to_dense() const;
  bool is_symmetric(double tol = 0.0) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Csr fwd_;
  Csr bwd_;
};

// Square sparsity pattern whose nonzero weights come from an external weight
// vector: entry (i, j) carries weight w[slot]. Used for edge masks that take
// part in differentiation; an undirected edge k contributes (u, v, k) and
// (v, u, k).
class EdgePattern {
 public:
  struct Entry {
    int row = 0;
    int col = 0;
    int slot = 0;
  };

  EdgePattern() = default;
  EdgePattern(std::size_t n, std::size_t num_slots, std::span<const Entry> entries);

  std::size_t size() const { return n_; }
  std::size_t num_slots() const { return num_slots_; }

  // CSR arrays; `slot` plays the role of the value array.
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const int> col() const { return col_; }
  std::span<const int> slot() const { return slot_; }
  std::span<const std::size_t> t_row_ptr() const { return t_row_ptr_; }
  std::span<const int> t_col() const { return t_col_; }
  std::span<const int> t_slot() const { return t_slot_; }

 private:
  std::size_t n_ = 0;
  std::size_t num_slots_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<int> col_;
  std::vector<int> slot_;
  std::vector<std::size_t> t_row_ptr_{0};
  std::vector<int> t_col_;
  std::vector<int> t_slot_;
};

}  // namespace sgx
