// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/sparse.hpp"

#include <cmath>
#include <numeric>

#include "homolab/error.hpp"

namespace homolab {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SparseSymMatrix SparseSymMatrix::identity(std::size_t dim) {
  SparseSymMatrix m;
  m.dim_ = dim;
  m.row_offsets_.resize(dim + 1);
  std::iota(m.row_offsets_.begin(), m.row_offsets_.end(), std::size_t{0});
  m.cols_.resize(dim);
  std::iota(m.cols_.begin(), m.cols_.end(), 0);
  m.values_.assign(dim, 1.0);
  return m;
}

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t dim, std::span<const std::size_t> rows,
                                               std::span<const std::size_t> cols, std::span<const double> values) {
  if (rows.size() != cols.size() || rows.size() != values.size()) {
    throw InvalidArgument("from_triplets: array lengths differ");
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });
  SparseSymMatrix m;
  m.dim_ = dim;
  m.row_offsets_.assign(dim + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t t = order[k];
    if (rows[t] >= dim || cols[t] >= dim) throw InvalidArgument("from_triplets: index out of range");
    if (k > 0 && rows[order[k - 1]] == rows[t] && cols[order[k - 1]] == cols[t]) {
      m.values_.back() += values[t];
      continue;
    }
    m.cols_.push_back(static_cast<std::int32_t>(cols[t]));
    m.values_.push_back(values[t]);
    ++m.row_offsets_[rows[t] + 1];
  }
  std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());
  return m;
}

void SparseSymMatrix::add(std::size_t i, std::size_t j, double v) {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
  if (it == last || *it != static_cast<std::int32_t>(j)) throw InvalidArgument("SparseSymMatrix::add outside pattern");
  values_[static_cast<std::size_t>(it - cols_.begin())] += v;
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
  if (it == last || *it != static_cast<std::int32_t>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseSymMatrix::scale(double s) {
  for (double& v : values_) v *= s;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseSymMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(dim_);
  multiply(x, y);
  return y;
}

double SparseSymMatrix::quadratic_form(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double row = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) row += values_[k] * y[cols_[k]];
    s += x[i] * row;
  }
  return s;
}

double SparseSymMatrix::sum_of_entries() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = at(i, i);
  return d;
}

double SparseSymMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols_[k]);
      worst = std::max(worst, std::abs(values_[k] - at(j, i)));
    }
  }
  return worst;
}

SparseSymMatrix SparseSymMatrix::principal_submatrix(std::span<const std::int64_t> keep_index,
                                                     std::size_t kept) const {
  SparseSymMatrix m;
  m.dim_ = kept;
  m.row_offsets_.assign(kept + 1, 0);
  std::vector<std::size_t> source_row(kept);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (keep_index[i] >= 0) source_row[static_cast<std::size_t>(keep_index[i])] = i;
  }
  for (std::size_t r = 0; r < kept; ++r) {
    const std::size_t i = source_row[r];
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::int64_t c = keep_index[static_cast<std::size_t>(cols_[k])];
      if (c < 0) continue;
      m.cols_.push_back(static_cast<std::int32_t>(c));
      m.values_.push_back(values_[k]);
    }
    m.row_offsets_[r + 1] = m.cols_.size();
  }
  return m;
}

void SparseSymMatrix::multiply_block(std::span<const std::int64_t> row_index, std::span<const std::int64_t> col_index,
                                     std::span<const double> x_cols, std::span<double> y_rows) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    if (row_index[i] < 0) continue;
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::int64_t c = col_index[static_cast<std::size_t>(cols_[k])];
      if (c >= 0) s += values_[k] * x_cols[static_cast<std::size_t>(c)];
    }
    y_rows[static_cast<std::size_t>(row_index[i])] = s;
  }
}

SparseSymMatrix SparseSymMatrix::without_dof(std::size_t pinned) const {
  std::vector<std::int64_t> keep(dim_);
  std::int64_t next = 0;
  for (std::size_t i = 0; i < dim_; ++i) keep[i] = i == pinned ? -1 : next++;
  return principal_submatrix(keep, dim_ - 1);
}

}  // namespace homolab
