// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "homolab/sparse.hpp"

namespace homolab {

/// Sparse Cholesky factorization K = L L^T of a symmetric positive definite
/// matrix (supernodal, fill-reducing ordering). Move-only.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const SparseSymMatrix& k);
  ~CholeskyFactor();
  CholeskyFactor(CholeskyFactor&&) noexcept;
  CholeskyFactor& operator=(CholeskyFactor&&) noexcept;
  CholeskyFactor(const CholeskyFactor&) = delete;
  CholeskyFactor& operator=(const CholeskyFactor&) = delete;

  std::size_t dim() const noexcept { return dim_; }
  std::vector<double> solve(std::span<const double> b) const;
  /// Solves for `columns` right-hand sides stored column-major in b (dim x columns).
  void solve_block(std::span<const double> b, std::size_t columns, std::span<double> x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t dim_ = 0;
};

enum class SolverKind { direct, cg };

struct SolveOptions {
  double tol = 1e-10;             ///< relative residual target ||Kx - b|| / ||b||
  SolverKind kind = SolverKind::direct;
  std::optional<std::size_t> pinned_dof;  ///< for semidefinite K with b orthogonal to the kernel
  int max_iter = 0;               ///< CG budget; 0 selects 10 * dim
};

struct SolveReport {
  std::vector<double> x;
  double relative_residual = 0.0;
  int iterations = 0;  ///< CG iterations, or refinement sweeps of the direct path
};

/// Solves K x = b. With a pinned dof, that row and column are removed and
/// x[pinned] = 0. Throws NumericalError on breakdown or when the residual
/// target cannot be met.
SolveReport factor_solve(const SparseSymMatrix& k, std::span<const double> b, const SolveOptions& options = {});

/// Jacobi-preconditioned conjugate gradients. Reports breakdown (non-positive
/// curvature) and stagnation as NumericalError.
SolveReport conjugate_gradient(const SparseSymMatrix& k, std::span<const double> b, double tol, int max_iter);

}  // namespace homolab
