// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "homolab/coefficient_field.hpp"
#include "homolab/grid.hpp"
#include "homolab/sparse.hpp"

namespace homolab {

/// Mesh-size policy for oscillating problems.
enum class MeshRule {
  fixed,        ///< use the configured cell count as is
  eps_over_16,  ///< h = eps / 16
};

MeshRule parse_mesh_rule(const std::string& text);
std::string to_string(MeshRule rule);

/// Cells per axis on the unit square for a given eps under `rule`.
int cells_for(MeshRule rule, double eps, int fixed_n);

/// True when the mesh has at least 8 cells per oscillation period (h <= eps/8).
bool resolves_oscillation(double eps, int n);

/// Stiffness of the cell operator -div(A(y) grad) on the periodic unit cell.
/// Positive semidefinite; its kernel is the constants.
SparseSymMatrix assemble_stiffness_torus(const CoefficientField& field, const TorusGrid& grid);

/// Full stiffness of -div(A(x/eps) grad) on the unit box, boundary rows included.
SparseSymMatrix assemble_stiffness_domain_full(const CoefficientField& field, double eps, const DomainGrid& grid);

/// Stiffness restricted to interior dofs (Dirichlet condition). Warns when the
/// mesh does not resolve eps.
SparseSymMatrix assemble_stiffness_domain(const CoefficientField& field, double eps, const DomainGrid& grid);

/// Consistent mass matrices. Entries sum to the volume of the domain.
SparseSymMatrix assemble_mass(const DomainGrid& grid);
SparseSymMatrix assemble_mass(const TorusGrid& grid);

/// Load of the cell problem for axis j (0-based): b_i = -int A(y) e_j . grad phi_i.
std::vector<double> assemble_cell_load(const CoefficientField& field, const TorusGrid& grid, int j);

/// Interior principal submatrix of a full domain matrix.
SparseSymMatrix restrict_to_interior(const SparseSymMatrix& full, const DomainGrid& grid);

/// Nodal gradients by averaging, at each node, the exact gradients of the
/// multilinear interpolant evaluated there from every adjacent element.
std::array<std::vector<double>, 2> recover_nodal_gradient(const DomainGrid& grid, const std::vector<double>& u);
std::array<std::vector<double>, 2> recover_nodal_gradient(const TorusGrid& grid, const std::vector<double>& u);

/// Physical gradient of a nodal function inside element e at reference point xi.
std::array<double, 2> element_gradient(const DomainGrid& grid, const std::vector<double>& u, std::size_t e,
                                       const Point& xi);
std::array<double, 2> element_gradient(const TorusGrid& grid, const std::vector<double>& u, std::size_t e,
                                       const Point& xi);

/// Value of a nodal function inside element e at reference point xi.
double element_value(const DomainGrid& grid, const std::vector<double>& u, std::size_t e, const Point& xi);

}  // namespace homolab
