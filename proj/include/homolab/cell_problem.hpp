// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "homolab/coefficient_field.hpp"
#include "homolab/grid.hpp"

namespace homolab {

/// Periodic correctors chi_j (one nodal vector per axis), each with zero mean.
struct CorrectorSet {
  TorusGrid grid;
  std::vector<std::vector<double>> chi;  ///< chi[j], j < dim
  double max_residual = 0.0;             ///< largest relative residual of the cell solves

  double mean(int j) const;
  double max_abs() const;
};

struct HomogenizedTensor {
  int dim = 2;
  Mat2 a_hat;
  double asymmetry() const { return dim == 2 ? std::abs(a_hat(0, 1) - a_hat(1, 0)) : 0.0; }
};

/// b_ij(y) = A_hat_ij - a_ij(y) - a_ik(y) d_k chi_j(y) at every Gauss point of
/// the torus grid, stored element by element (quadrature points axis-0 fastest).
struct BField {
  TorusGrid grid;
  std::vector<Mat2> values;  ///< size num_elements * points_per_element

  std::size_t points_per_element() const { return std::size_t{1} << grid.dim(); }
  /// Mean of each component over the unit cell.
  Mat2 mean() const;
  double max_abs() const;
};

/// F_kij = d_k f_ij - d_i f_kj with Laplace f_ij = b_ij on the torus. Nodal
/// values; antisymmetric in (k, i) exactly.
struct FluxCorrector {
  TorusGrid grid;
  std::array<std::array<std::vector<double>, 2>, 2> f;                    ///< f[i][j]
  std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> flux;  ///< flux[k][i][j]
  double max_abs = 0.0;

  /// Largest |F_kij + F_ikj| over all nodes and indices.
  double antisymmetry_defect() const;
};

/// Solves the d periodic cell problems -div(A(grad chi_j + e_j)) = 0 with one
/// shared factorization, pinning dof 0 and then subtracting the mean.
CorrectorSet solve_correctors(const CoefficientField& field, const TorusGrid& grid, double tol = 1e-10);

/// A_hat_ij = int_Y a_ij + a_ik d_k chi_j, by the Gauss rule of the grid.
HomogenizedTensor homogenized_tensor(const CoefficientField& field, const CorrectorSet& correctors);

BField b_field(const CoefficientField& field, const CorrectorSet& correctors, const HomogenizedTensor& a_hat);

FluxCorrector flux_corrector(const BField& b, double tol = 1e-10);

/// Consistency of the weak identity sum_k int F_kij d_k v = -int b_ij v,
/// tested on interpolated low Fourier modes v. Returns
/// max |sum_k int F_kij d_k v + int b_ij v| / (max_ij ||b_ij||_L2 * ||grad v||_L2).
double weak_divergence_residual(const FluxCorrector& flux, const BField& b);

/// Convenience: correctors and A_hat on a torus grid with n cells per axis.
HomogenizedTensor compute_homogenized(const CoefficientField& field, int n, double tol = 1e-10);

}  // namespace homolab
