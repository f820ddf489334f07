// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "homolab/error.hpp"
#include "homolab/sparse.hpp"

namespace homolab {

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;  ///< M-normalized: x^T M x = 1
  double residual = 0.0;       ///< ||Kx - lambda Mx|| / (lambda ||Mx||)
};

struct EigenOptions {
  double tol = 1e-9;
  int max_iter = 400;          ///< block expansion steps
  std::uint64_t seed = 20240601;
  int block_size = 4;
  int max_basis = 0;           ///< 0: chosen from count and block size
};

/// Thrown when the iteration budget runs out. The partial pairs are the best
/// approximations at that point and must not be used as results.
class EigenConvergenceError : public NumericalError {
 public:
  EigenConvergenceError(const std::string& message, std::vector<EigenPair> partial)
      : NumericalError(message), partial_(std::move(partial)) {}
  const std::vector<EigenPair>& partial() const noexcept { return partial_; }

 private:
  std::vector<EigenPair> partial_;
};

/// Smallest `count` eigenpairs of K x = lambda M x for symmetric positive
/// definite K and M. Shift-invert block Lanczos with thick restart, full
/// M-reorthogonalization and a seeded starting block. Eigenvalues ascend;
/// within a multiple eigenvalue the vectors are an arbitrary M-orthonormal basis.
std::vector<EigenPair> smallest_eigenpairs(const SparseSymMatrix& k, const SparseSymMatrix& m, int count,
                                           const EigenOptions& options = {});

/// Relative residual ||Kx - lambda Mx|| / (lambda ||Mx||).
double eigen_residual(const SparseSymMatrix& k, const SparseSymMatrix& m, double lambda,
                      const std::vector<double>& x);

}  // namespace homolab
