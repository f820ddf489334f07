// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "homolab/coefficient_field.hpp"

namespace homolab {

/// Tensor-product Gauss rule on the reference cell [0,1]^d, 2 points per axis.
/// Points are ordered with axis 0 varying fastest.
struct Quadrature {
  int dim = 2;
  std::vector<Point> points;
  std::vector<double> weights;  ///< sum to 1 (reference cell volume)

  static Quadrature gauss2(int dim);
  std::size_t size() const noexcept { return weights.size(); }
};

/// Values and reference gradients of the 2^d multilinear shape functions.
/// Local node a has coordinate bit k = (a >> k) & 1 along axis k.
struct ShapeValues {
  std::array<double, 4> value{};
  std::array<std::array<double, 2>, 4> grad{};  ///< d/dxi_k N_a on the reference cell
};

ShapeValues shape_functions(int dim, const Point& xi);

/// Uniform mesh of the periodic unit cell Y = [0,1)^d with n cells per axis.
/// Opposite faces are identified, so there are n^d dofs.
class TorusGrid {
 public:
  TorusGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  std::size_t num_dofs() const noexcept { return num_dofs_; }
  std::size_t num_elements() const noexcept { return num_dofs_; }
  int nodes_per_element() const noexcept { return 1 << dim_; }

  /// Dof of node with integer coordinates (i, j), wrapped modulo n.
  std::size_t dof(long i, long j = 0) const noexcept;
  /// Lower-left corner cell indices of element e.
  std::array<int, 2> element_origin(std::size_t e) const noexcept;
  /// Dofs of element e in local-node order.
  std::array<std::size_t, 4> element_dofs(std::size_t e) const noexcept;
  /// Physical coordinates of node `dof` inside [0,1)^d.
  Point node_coordinates(std::size_t dof) const noexcept;

 private:
  int dim_;
  int n_;
  std::size_t num_dofs_;
};

/// Edge (d = 2) or endpoint (d = 1) of the boundary of the unit box.
struct BoundaryFacet {
  std::array<std::size_t, 2> nodes{};  ///< second entry unused for d = 1
  std::size_t element = 0;             ///< adjacent element
  Point normal{};                      ///< unit outward normal
};

/// Uniform mesh of Omega = (0,1)^d with n cells per axis and (n+1)^d nodes.
/// Nodes with a coordinate in {0, 1} carry the Dirichlet condition.
class DomainGrid {
 public:
  DomainGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_elements() const noexcept { return num_elements_; }
  std::size_t num_interior() const noexcept { return interior_.size(); }
  int nodes_per_element() const noexcept { return 1 << dim_; }

  std::size_t node(int i, int j = 0) const noexcept;
  std::array<int, 2> node_indices(std::size_t node) const noexcept;
  std::array<int, 2> element_origin(std::size_t e) const noexcept;
  std::array<std::size_t, 4> element_nodes(std::size_t e) const noexcept;
  Point node_coordinates(std::size_t node) const noexcept;
  Point element_centroid(std::size_t e) const noexcept;

  bool is_boundary(std::size_t node) const noexcept { return interior_index_[node] < 0; }
  /// Interior numbering of a node, or -1 on the boundary.
  std::int64_t interior_index(std::size_t node) const noexcept { return interior_index_[node]; }
  const std::vector<std::size_t>& interior_nodes() const noexcept { return interior_; }
  const std::vector<std::size_t>& boundary_nodes() const noexcept { return boundary_; }
  /// Boundary facets, counter-clockwise starting on y = 0 (d = 2).
  const std::vector<BoundaryFacet>& boundary_facets() const noexcept { return facets_; }

  /// Scatter interior values into a full nodal vector (zero on the boundary).
  std::vector<double> expand(const std::vector<double>& interior_values) const;
  /// Gather the interior entries of a full nodal vector.
  std::vector<double> restrict_to_interior(const std::vector<double>& full) const;

 private:
  int dim_;
  int n_;
  std::size_t num_nodes_;
  std::size_t num_elements_;
  std::vector<std::int64_t> interior_index_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<BoundaryFacet> facets_;
};

}  // namespace homolab
