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

#include "sgx/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "sgx/errors.hpp"

namespace sgx {
namespace {

template <typename E, typename Payload>
void build_csr(std::size_t rows, std::vector<E> sorted, std::vector<std::size_t>& row_ptr,
               std::vector<int>& col, std::vector<Payload>& payload, auto get_payload) {
  row_ptr.assign(rows + 1, 0);
  col.clear();
  payload.clear();
  col.reserve(sorted.size());
  payload.reserve(sorted.size());
  for (const auto& e : sorted) {
    ++row_ptr[static_cast<std::size_t>(e.row) + 1];
    col.push_back(e.col);
    payload.push_back(get_payload(e));
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::span<const Entry> entries)
    : rows_(rows), cols_(cols) {
  std::vector<Entry> sorted(entries.begin(), entries.end());
  for (const auto& e : sorted) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= rows ||
        static_cast<std::size_t>(e.col) >= cols) {
      throw DimensionError("sparse entry (" + std::to_string(e.row) + ", " +
                           std::to_string(e.col) + ") outside " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
  }
  auto by_row = [](const Entry& a, const Entry& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  };
  std::stable_sort(sorted.begin(), sorted.end(), by_row);
  std::vector<Entry> merged;
  merged.reserve(sorted.size());
  for (const auto& e : sorted) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  build_csr(rows, merged, fwd_.row_ptr, fwd_.col, fwd_.val,
            [](const Entry& e) { return e.weight; });

  std::vector<Entry> t(merged.size());
  std::transform(merged.begin(), merged.end(), t.begin(),
                 [](const Entry& e) { return Entry{e.col, e.row, e.weight}; });
  std::stable_sort(t.begin(), t.end(), by_row);
  build_csr(cols, t, bwd_.row_ptr, bwd_.col, bwd_.val, [](const Entry& e) { return e.weight; });
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Entry> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = {static_cast<int>(i), static_cast<int>(i), 1.0};
  return SparseMatrix(n, n, e);
}

std::vector<SparseMatrix::Entry> SparseMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = fwd_.row_ptr[r]; p < fwd_.row_ptr[r + 1]; ++p) {
      out.push_back({static_cast<int>(r), fwd_.col[p], fwd_.val[p]});
    }
  }
  return out;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (const auto& e : entries()) d[static_cast<std::size_t>(e.row) * cols_ + e.col] = e.weight;
  return d;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  if (fwd_.col != bwd_.col || fwd_.row_ptr != bwd_.row_ptr) return false;
  for (std::size_t p = 0; p < fwd_.val.size(); ++p) {
    if (std::abs(fwd_.val[p] - bwd_.val[p]) > tol) return false;
  }
  return true;
}

EdgePattern::EdgePattern(std::size_t n, std::size_t num_slots, std::span<const Entry> entries)
    : n_(n), num_slots_(num_slots) {
  std::vector<Entry> sorted(entries.begin(), entries.end());
  for (const auto& e : sorted) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= n ||
        static_cast<std::size_t>(e.col) >= n || e.slot < 0 ||
        static_cast<std::size_t>(e.slot) >= num_slots) {
      throw DimensionError("edge pattern entry (" + std::to_string(e.row) + ", " +
                           std::to_string(e.col) + ", slot " + std::to_string(e.slot) +
                           ") out of range");
    }
  }
  auto by_row = [](const Entry& a, const Entry& b) {
    return std::tie(a.row, a.col, a.slot) < std::tie(b.row, b.col, b.slot);
  };
  std::stable_sort(sorted.begin(), sorted.end(), by_row);
  build_csr(n, sorted, row_ptr_, col_, slot_, [](const Entry& e) { return e.slot; });
  std::vector<Entry> t(sorted.size());
  std::transform(sorted.begin(), sorted.end(), t.begin(),
                 [](const Entry& e) { return Entry{e.col, e.row, e.slot}; });
  std::stable_sort(t.begin(), t.end(), by_row);
  build_csr(n, t, t_row_ptr_, t_col_, t_slot_, [](const Entry& e) { return e.slot; });
}

}  // namespace sgx
