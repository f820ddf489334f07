// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace homolab {

/// Square sparse matrix in compressed-row storage, symmetric by construction.
/// Column indices are sorted and unique within each row; both triangles are
/// stored explicitly.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  /// Build the sparsity pattern from a list of element connectivities: every
  /// pair of dofs sharing an element gets a (zero) slot.
  template <typename ElementDofs>
  static SparseSymMatrix from_elements(std::size_t dim, std::size_t num_elements, int nodes_per_element,
                                       ElementDofs&& dofs_of);

  static SparseSymMatrix identity(std::size_t dim);
  /// Build from explicit rows (column, value) pairs; duplicates are summed.
  static SparseSymMatrix from_triplets(std::size_t dim, std::span<const std::size_t> rows,
                                       std::span<const std::size_t> cols, std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::int32_t>& col_indices() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Adds v to entry (i, j). The slot must exist in the pattern.
  void add(std::size_t i, std::size_t j, double v);
  /// Entry (i, j), zero when outside the pattern.
  double at(std::size_t i, std::size_t j) const;
  void scale(double s);

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x, std::span<const double> y) const;
  double sum_of_entries() const;
  std::vector<double> diagonal() const;

  /// Largest |A_ij - A_ji| over all stored entries.
  double asymmetry() const;
  /// Principal submatrix on the rows/cols with keep_index[i] >= 0; the kept
  /// dofs are renumbered by keep_index.
  SparseSymMatrix principal_submatrix(std::span<const std::int64_t> keep_index, std::size_t kept) const;
  /// y = A(rows, cols) x for an off-diagonal block given by two index maps.
  void multiply_block(std::span<const std::int64_t> row_index, std::span<const std::int64_t> col_index,
                      std::span<const double> x_cols, std::span<double> y_rows) const;
  /// Same matrix with row/column `pinned` removed (renumbering the rest).
  SparseSymMatrix without_dof(std::size_t pinned) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::int32_t> cols_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// ---------------------------------------------------------------------------

template <typename ElementDofs>
SparseSymMatrix SparseSymMatrix::from_elements(std::size_t dim, std::size_t num_elements, int nodes_per_element,
                                               ElementDofs&& dofs_of) {
  // Count neighbours per row with a small per-row scratch list; rows have at
  // most 3^d entries on tensor meshes, so linear scans are fine.
  std::vector<std::vector<std::int32_t>> rows(dim);
  for (std::size_t e = 0; e < num_elements; ++e) {
    const auto dofs = dofs_of(e);
    for (int a = 0; a < nodes_per_element; ++a) {
      auto& row = rows[dofs[a]];
      for (int b = 0; b < nodes_per_element; ++b) {
        const auto c = static_cast<std::int32_t>(dofs[b]);
        bool seen = false;
        for (auto existing : row) {
          if (existing == c) {
            seen = true;
            break;
          }
        }
        if (!seen) row.push_back(c);
      }
    }
  }
  SparseSymMatrix m;
  m.dim_ = dim;
  m.row_offsets_.assign(dim + 1, 0);
  for (std::size_t i = 0; i < dim; ++i) m.row_offsets_[i + 1] = m.row_offsets_[i] + rows[i].size();
  m.cols_.reserve(m.row_offsets_.back());
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    m.cols_.insert(m.cols_.end(), row.begin(), row.end());
    std::vector<std::int32_t>().swap(row);
  }
  m.values_.assign(m.cols_.size(), 0.0);
  return m;
}

}  // namespace homolab
