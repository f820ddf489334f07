// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "homolab/coefficient_field.hpp"
#include "homolab/eigensolver.hpp"

namespace homolab {

/// -(a(x/eps) u')' = lambda u on (0, 1) with u(0) = u(1) = 0, linear elements.
struct OneDimProblem {
  CoefficientField field;
  double eps = 0.0;  ///< 0 selects the homogenized operator with constant a_bar
  int n = 0;         ///< mesh cells
  double a_bar = 0.0;  ///< harmonic mean (int_0^1 dy / a)^{-1}

  double h() const { return 1.0 / n; }
  /// Coefficient at physical x (a_bar when eps = 0).
  double coefficient_at(double x) const;
};

/// Validates the field (scalar, d = 1) and computes the harmonic mean.
OneDimProblem make_1d_problem(const CoefficientField& field, double eps, int n);

/// Same coefficient, homogenized operator (eps = 0).
OneDimProblem homogenized_1d(const OneDimProblem& problem);

/// Cells used by the critical-regime scans: max(4096, ceil(64 / eps)).
int resonance_cells(double eps);

/// Element stiffnesses k_e = (int_e dx / a(x/eps))^{-1}: exact for the
/// harmonic average, closed form when the field provides an inverse primitive.
std::vector<double> element_stiffness_1d(const OneDimProblem& problem);

/// Smallest `count` eigenpairs by Sturm bisection on the tridiagonal pencil
/// and inverse iteration. Vectors hold all n + 1 nodes (zero at both ends),
/// M-normalized. `residual` is the normwise backward error
/// ||Kx - lambda Mx|| / ((||K|| + |lambda| ||M||) ||x||), which stays meaningful
/// on the very fine meshes used here. Requires n >= 64 count.
std::vector<EigenPair> solve_1d_spectrum(const OneDimProblem& problem, int count, double tol = 1e-9, int jobs = 1);

/// Number of pencil eigenvalues strictly below sigma.
int count_below_1d(const OneDimProblem& problem, double sigma);

/// |u'(0)|^2 + |u'(1)|^2 with a u' at the endpoints recovered variationally
/// from the residual of the discrete equation.
double endpoint_flux(const EigenPair& pair, const OneDimProblem& problem);

struct ResonanceRow {
  double eps = 0.0;
  int k = 0;
  double lambda = 0.0;
  double eps2_lambda = 0.0;
  double flux = 0.0;
  double flux_over_lambda = 0.0;
  double flux_over_lambda_1p5 = 0.0;
};

struct ResonanceScan {
  std::vector<ResonanceRow> rows;
  std::size_t argmax_flux_over_lambda = 0;  ///< row index
  int n = 0;
  double a_bar = 0.0;
};

/// Every eigenvalue with eps^2 lambda in [eps2_min, eps2_max]. n = 0 selects
/// resonance_cells(eps); throws InvalidArgument when n < 32 / eps or the
/// spectrum needed exceeds n / 64 eigenvalues.
ResonanceScan resonance_scan(const CoefficientField& field, double eps, double eps2_min = 0.0,
                             double eps2_max = 4.0, int n = 0, double tol = 1e-9, int jobs = 1);

}  // namespace homolab
