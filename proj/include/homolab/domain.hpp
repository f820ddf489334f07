// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "homolab/coefficient_field.hpp"
#include "homolab/eigensolver.hpp"
#include "homolab/grid.hpp"
#include "homolab/linear_solver.hpp"
#include "homolab/sparse.hpp"

namespace homolab {

/// Either the oscillating operator -div(A(x/eps) grad) or the homogenized
/// constant-coefficient operator -div(A_hat grad) on the unit box.
class DomainOperator {
 public:
  static DomainOperator oscillating(CoefficientField field, double eps);
  static DomainOperator homogenized(int dim, const Mat2& a_hat);

  bool is_oscillating() const noexcept { return eps_ > 0.0; }
  /// "oscillating" or "homogenized", as written to CSV files.
  const std::string& label() const noexcept { return label_; }
  int dim() const noexcept { return field_.dim(); }
  /// eps of the oscillating operator; 0 for the homogenized one.
  double eps() const noexcept { return eps_; }
  const CoefficientField& field() const noexcept { return field_; }

  /// Coefficient matrix at a physical point x of the unit box.
  Mat2 coefficient_at(const Point& x) const;
  /// Spatial gradient d/dx_k of the coefficient at x.
  std::array<Mat2, 2> coefficient_gradient_at(const Point& x) const;

  SparseSymMatrix stiffness_full(const DomainGrid& grid) const;

 private:
  DomainOperator(CoefficientField field, double eps, std::string label)
      : field_(std::move(field)), eps_(eps), label_(std::move(label)) {}
  CoefficientField field_;
  double eps_ = 0.0;
  std::string label_;
};

/// Assembled Dirichlet problem of one operator on one grid.
class DomainSystem {
 public:
  DomainSystem(const DomainOperator& op, const DomainGrid& grid);

  const DomainOperator& op() const noexcept { return op_; }
  const DomainGrid& grid() const noexcept { return grid_; }
  const SparseSymMatrix& stiffness_full() const noexcept { return k_full_; }
  const SparseSymMatrix& stiffness() const noexcept { return k_; }  ///< interior block
  const SparseSymMatrix& mass_full() const noexcept { return m_full_; }
  const SparseSymMatrix& mass() const noexcept { return m_; }  ///< interior block

 private:
  DomainOperator op_;
  DomainGrid grid_;
  SparseSymMatrix k_full_, k_, m_full_, m_;
};

/// Nodal interpolant of a function on all grid nodes.
template <typename F>
std::vector<double> interpolate(const DomainGrid& grid, F&& f) {
  std::vector<double> v(grid.num_nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node_coordinates(i));
  return v;
}

double l2_norm(const DomainSystem& system, const std::vector<double>& u_full);

/// Discrete weak solution of L u = f with u = 0 on the boundary. f and the
/// result are full nodal vectors; the load is M f (consistent mass).
std::vector<double> solve_source(const DomainSystem& system, const std::vector<double>& f_full,
                                 const SolveOptions& options = {});

struct DirichletCorrector {
  double eps = 0.0;
  std::vector<std::vector<double>> phi;  ///< phi[j]: full nodal vector equal to x_j on the boundary
  double deviation_sup = 0.0;            ///< max_j max_nodes |phi_j - x_j|
  double min_value = 0.0;                ///< min over j, nodes of phi_j
  double max_value = 0.0;
};

/// L_eps Phi_j = 0 in the interior, Phi_j = x_j on the boundary.
DirichletCorrector dirichlet_corrector(const DomainSystem& system, const SolveOptions& options = {});

struct ApproximationReport {
  double eps = 0.0;
  double h = 0.0;
  double h1_error = 0.0;    ///< ||w||_{H^1}, w = u_eps - u_0 - (Phi_j - x_j) d_j u_0
  double l2_error = 0.0;    ///< ||u_eps - u_0||_{L^2}
  double grad_error = 0.0;  ///< ||grad u_eps - (grad Phi_j) d_j u_0||_{L^2}
  double f_norm = 0.0;
};

/// Builds w from nodal values with d_j u_0 from recovered nodal gradients and
/// measures it by 2x2 Gauss quadrature. Both solutions live on the corrector's grid.
ApproximationReport corrector_approximation(const DomainGrid& grid, const std::vector<double>& u_eps,
                                            const std::vector<double>& u_0, const DirichletCorrector& corrector,
                                            double f_norm);

/// Smallest eigenpairs of the Dirichlet problem; eigenvectors are returned as
/// full nodal vectors (zero on the boundary), M-normalized.
std::vector<EigenPair> eigen_spectrum(const DomainSystem& system, int count, const EigenOptions& options = {});

struct SpectralProjection {
  std::vector<double> projection;  ///< S(f), full nodal vector
  std::vector<double> remainder;   ///< R(f) = sum (lambda_k - lam) <phi_k, f> phi_k
  int window_count = 0;
  double f_norm = 0.0;
  double projection_norm = 0.0;
  double remainder_norm = 0.0;
  double remainder_constant = 0.0;  ///< ||R f|| / (sqrt(lam) ||f||), 0 for f = 0
};

/// Cluster projection onto eigenfunctions with sqrt(lambda_k) in [sqrt(lam), sqrt(lam) + 1).
/// Throws NumericalError when the computed spectrum does not reach past the window.
SpectralProjection spectral_projection(const DomainSystem& system, const std::vector<EigenPair>& spectrum,
                                       const std::vector<double>& f_full, double lam);

}  // namespace homolab
