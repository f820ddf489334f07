// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/grid.hpp"

#include <cmath>

#include "homolab/error.hpp"

namespace homolab {

Quadrature Quadrature::gauss2(int dim) {
  const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double g1 = 0.5 + 0.5 / std::sqrt(3.0);
  Quadrature q;
  q.dim = dim;
  if (dim == 1) {
    q.points = {Point{g0, 0.0}, Point{g1, 0.0}};
    q.weights = {0.5, 0.5};
  } else {
    for (double y : {g0, g1}) {
      for (double x : {g0, g1}) {
        q.points.push_back(Point{x, y});
        q.weights.push_back(0.25);
      }
    }
  }
  return q;
}

ShapeValues shape_functions(int dim, const Point& xi) {
  ShapeValues s;
  const int nodes = 1 << dim;
  for (int a = 0; a < nodes; ++a) {
    double value = 1.0;
    std::array<double, 2> grad{1.0, dim > 1 ? 1.0 : 0.0};
    for (int k = 0; k < dim; ++k) {
      const bool upper = (a >> k) & 1;
      const double f = upper ? xi[k] : 1.0 - xi[k];
      const double df = upper ? 1.0 : -1.0;
      value *= f;
      for (int m = 0; m < dim; ++m) grad[m] *= (m == k) ? df : f;
    }
    s.value[a] = value;
    s.grad[a] = grad;
  }
  return s;
}

// ---------------------------------------------------------------------------

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw InvalidArgument("TorusGrid supports d = 1 or d = 2");
  if (n < 2) throw InvalidArgument("TorusGrid needs n >= 2 cells per axis");
  num_dofs_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

std::size_t TorusGrid::dof(long i, long j) const noexcept {
  const long n = n_;
  const long wi = ((i % n) + n) % n;
  if (dim_ == 1) return static_cast<std::size_t>(wi);
  const long wj = ((j % n) + n) % n;
  return static_cast<std::size_t>(wi + n * wj);
}

std::array<int, 2> TorusGrid::element_origin(std::size_t e) const noexcept {
  if (dim_ == 1) return {static_cast<int>(e), 0};
  return {static_cast<int>(e % n_), static_cast<int>(e / n_)};
}

std::array<std::size_t, 4> TorusGrid::element_dofs(std::size_t e) const noexcept {
  const auto [i, j] = element_origin(e);
  if (dim_ == 1) return {dof(i), dof(i + 1), 0, 0};
  return {dof(i, j), dof(i + 1, j), dof(i, j + 1), dof(i + 1, j + 1)};
}

Point TorusGrid::node_coordinates(std::size_t d) const noexcept {
  if (dim_ == 1) return {static_cast<double>(d) * h(), 0.0};
  return {static_cast<double>(d % n_) * h(), static_cast<double>(d / n_) * h()};
}

// ---------------------------------------------------------------------------

DomainGrid::DomainGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw InvalidArgument("DomainGrid supports d = 1 or d = 2");
  if (n < 2) throw InvalidArgument("DomainGrid needs n >= 2 cells per axis");
  const std::size_t side = static_cast<std::size_t>(n) + 1;
  num_nodes_ = dim == 1 ? side : side * side;
  num_elements_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;

  interior_index_.assign(num_nodes_, -1);
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    const auto [i, j] = node_indices(v);
    bool boundary = i == 0 || i == n;
    if (dim == 2) boundary = boundary || j == 0 || j == n;
    if (boundary) {
      boundary_.push_back(v);
    } else {
      interior_index_[v] = static_cast<std::int64_t>(interior_.size());
      interior_.push_back(v);
    }
  }

  if (dim == 1) {
    facets_.push_back({{node(0), node(0)}, 0, Point{-1.0, 0.0}});
    facets_.push_back({{node(n), node(n)}, static_cast<std::size_t>(n - 1), Point{1.0, 0.0}});
    return;
  }
  for (int e = 0; e < n; ++e) {
    facets_.push_back({{node(e, 0), node(e + 1, 0)}, static_cast<std::size_t>(e), Point{0.0, -1.0}});
  }
  for (int e = 0; e < n; ++e) {
    facets_.push_back(
        {{node(n, e), node(n, e + 1)}, static_cast<std::size_t>(n - 1 + n * e), Point{1.0, 0.0}});
  }
  for (int e = 0; e < n; ++e) {
    facets_.push_back(
        {{node(e, n), node(e + 1, n)}, static_cast<std::size_t>(e + n * (n - 1)), Point{0.0, 1.0}});
  }
  for (int e = 0; e < n; ++e) {
    facets_.push_back({{node(0, e), node(0, e + 1)}, static_cast<std::size_t>(n * e), Point{-1.0, 0.0}});
  }
}

std::size_t DomainGrid::node(int i, int j) const noexcept {
  return static_cast<std::size_t>(i) + (dim_ == 2 ? static_cast<std::size_t>(n_ + 1) * j : 0);
}

std::array<int, 2> DomainGrid::node_indices(std::size_t v) const noexcept {
  if (dim_ == 1) return {static_cast<int>(v), 0};
  const std::size_t side = static_cast<std::size_t>(n_) + 1;
  return {static_cast<int>(v % side), static_cast<int>(v / side)};
}

std::array<int, 2> DomainGrid::element_origin(std::size_t e) const noexcept {
  if (dim_ == 1) return {static_cast<int>(e), 0};
  return {static_cast<int>(e % n_), static_cast<int>(e / n_)};
}

std::array<std::size_t, 4> DomainGrid::element_nodes(std::size_t e) const noexcept {
  const auto [i, j] = element_origin(e);
  if (dim_ == 1) return {node(i), node(i + 1), 0, 0};
  return {node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
}

Point DomainGrid::node_coordinates(std::size_t v) const noexcept {
  const auto [i, j] = node_indices(v);
  return {i * h(), dim_ == 2 ? j * h() : 0.0};
}

Point DomainGrid::element_centroid(std::size_t e) const noexcept {
  const auto [i, j] = element_origin(e);
  return {(i + 0.5) * h(), dim_ == 2 ? (j + 0.5) * h() : 0.0};
}

std::vector<double> DomainGrid::expand(const std::vector<double>& interior_values) const {
  if (interior_values.size() != interior_.size()) throw InvalidArgument("expand: size mismatch");
  std::vector<double> full(num_nodes_, 0.0);
  for (std::size_t k = 0; k < interior_.size(); ++k) full[interior_[k]] = interior_values[k];
  return full;
}

std::vector<double> DomainGrid::restrict_to_interior(const std::vector<double>& full) const {
  if (full.size() != num_nodes_) throw InvalidArgument("restrict_to_interior: size mismatch");
  std::vector<double> out(interior_.size());
  for (std::size_t k = 0; k < interior_.size(); ++k) out[k] = full[interior_[k]];
  return out;
}

}  // namespace homolab
