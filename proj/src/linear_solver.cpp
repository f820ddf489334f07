// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/linear_solver.hpp"

#include <cholmod.h>

#include <cmath>
#include <string>

#include "homolab/error.hpp"

namespace homolab {

struct CholeskyFactor::Impl {
  cholmod_common common{};
  cholmod_factor* factor = nullptr;

  Impl() { cholmod_start(&common); }
  ~Impl() {
    if (factor) cholmod_free_factor(&factor, &common);
    cholmod_finish(&common);
  }
  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;
};

CholeskyFactor::CholeskyFactor(const SparseSymMatrix& k) : impl_(std::make_unique<Impl>()), dim_(k.dim()) {
  if (dim_ == 0) throw InvalidArgument("cannot factor an empty matrix");
  auto& c = impl_->common;
  c.supernodal = CHOLMOD_SUPERNODAL;
  c.print = 0;
  c.error_handler = nullptr;

  // Upper triangle in compressed-column form: row i of the symmetric CSR is
  // column i, keeping entries with row index <= i.
  const auto& offsets = k.row_offsets();
  const auto& cols = k.col_indices();
  const auto& vals = k.values();
  std::size_t upper = 0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p)
      if (static_cast<std::size_t>(cols[p]) <= i) ++upper;

  cholmod_sparse* a = cholmod_allocate_sparse(dim_, dim_, upper, 1, 1, 1, CHOLMOD_REAL, &c);
  if (!a) throw NumericalError("Cholesky: out of memory allocating the matrix");
  auto* ap = static_cast<int*>(a->p);
  auto* ai = static_cast<int*>(a->i);
  auto* ax = static_cast<double*>(a->x);
  std::size_t q = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    ap[i] = static_cast<int>(q);
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
      if (static_cast<std::size_t>(cols[p]) <= i) {
        ai[q] = cols[p];
        ax[q] = vals[p];
        ++q;
      }
    }
  }
  ap[dim_] = static_cast<int>(q);

  impl_->factor = cholmod_analyze(a, &c);
  if (!impl_->factor) {
    cholmod_free_sparse(&a, &c);
    throw NumericalError("Cholesky: symbolic analysis failed");
  }
  cholmod_factorize(a, impl_->factor, &c);
  cholmod_free_sparse(&a, &c);
  if (c.status == CHOLMOD_NOT_POSDEF) {
    throw NumericalError("Cholesky: matrix is not positive definite (breakdown at column " +
                         std::to_string(impl_->factor->minor) + ")");
  }
  if (c.status != CHOLMOD_OK) throw NumericalError("Cholesky: factorization failed");
}

CholeskyFactor::~CholeskyFactor() = default;
CholeskyFactor::CholeskyFactor(CholeskyFactor&&) noexcept = default;
CholeskyFactor& CholeskyFactor::operator=(CholeskyFactor&&) noexcept = default;

void CholeskyFactor::solve_block(std::span<const double> b, std::size_t columns, std::span<double> x) const {
  if (b.size() != dim_ * columns || x.size() != dim_ * columns) throw InvalidArgument("solve_block: size mismatch");
  if (columns == 0) return;
  auto& c = impl_->common;
  cholmod_dense rhs{};
  rhs.nrow = dim_;
  rhs.ncol = columns;
  rhs.nzmax = dim_ * columns;
  rhs.d = dim_;
  rhs.x = const_cast<double*>(b.data());
  rhs.xtype = CHOLMOD_REAL;
  rhs.dtype = CHOLMOD_DOUBLE;
  cholmod_dense* sol = cholmod_solve(CHOLMOD_A, impl_->factor, &rhs, &c);
  if (!sol) throw NumericalError("Cholesky: triangular solve failed");
  const auto* sx = static_cast<const double*>(sol->x);
  for (std::size_t col = 0; col < columns; ++col)
    for (std::size_t i = 0; i < dim_; ++i) x[col * dim_ + i] = sx[col * sol->d + i];
  cholmod_free_dense(&sol, &c);
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
  std::vector<double> x(dim_);
  solve_block(b, 1, x);
  return x;
}

namespace {

double relative_residual(const SparseSymMatrix& k, std::span<const double> x, std::span<const double> b,
                         std::vector<double>& r) {
  r.resize(b.size());
  k.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

SolveReport solve_definite(const SparseSymMatrix& k, std::span<const double> b, const SolveOptions& opt) {
  if (opt.kind == SolverKind::cg) {
    return conjugate_gradient(k, b, opt.tol, opt.max_iter > 0 ? opt.max_iter : static_cast<int>(10 * k.dim()));
  }
  SolveReport rep;
  if (norm2(b) == 0.0) {
    rep.x.assign(b.size(), 0.0);
    return rep;
  }
  const CholeskyFactor factor(k);
  rep.x = factor.solve(b);
  std::vector<double> r;
  rep.relative_residual = relative_residual(k, rep.x, b, r);
  while (rep.relative_residual > opt.tol && rep.iterations < 3) {
    const auto dx = factor.solve(r);
    for (std::size_t i = 0; i < dx.size(); ++i) rep.x[i] += dx[i];
    rep.relative_residual = relative_residual(k, rep.x, b, r);
    ++rep.iterations;
  }
  if (rep.relative_residual > opt.tol) {
    throw NumericalError("direct solve residual " + std::to_string(rep.relative_residual) +
                         " exceeds tolerance after refinement");
  }
  return rep;
}

}  // namespace

SolveReport factor_solve(const SparseSymMatrix& k, std::span<const double> b, const SolveOptions& options) {
  if (b.size() != k.dim()) throw InvalidArgument("factor_solve: right-hand side size mismatch");
  if (!options.pinned_dof) return solve_definite(k, b, options);

  const std::size_t p = *options.pinned_dof;
  if (p >= k.dim()) throw InvalidArgument("factor_solve: pinned dof out of range");
  const SparseSymMatrix reduced = k.without_dof(p);
  std::vector<double> rb;
  rb.reserve(k.dim() - 1);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (i != p) rb.push_back(b[i]);
  SolveReport inner = solve_definite(reduced, rb, options);

  SolveReport rep;
  rep.iterations = inner.iterations;
  rep.x.assign(k.dim(), 0.0);
  for (std::size_t i = 0, q = 0; i < k.dim(); ++i)
    if (i != p) rep.x[i] = inner.x[q++];
  std::vector<double> r;
  rep.relative_residual = relative_residual(k, rep.x, b, r);
  if (rep.relative_residual > std::max(options.tol, 1e3 * inner.relative_residual + 1e-14)) {
    throw NumericalError("pinned solve residual " + std::to_string(rep.relative_residual) +
                         " too large: right-hand side not orthogonal to the kernel?");
  }
  return rep;
}

SolveReport conjugate_gradient(const SparseSymMatrix& k, std::span<const double> b, double tol, int max_iter) {
  const std::size_t n = k.dim();
  if (b.size() != n) throw InvalidArgument("conjugate_gradient: size mismatch");
  SolveReport rep;
  rep.x.assign(n, 0.0);
  const double nb = norm2(b);
  if (nb == 0.0) return rep;

  std::vector<double> inv_diag = k.diagonal();
  for (auto& d : inv_diag) {
    if (!(d > 0.0)) throw NumericalError("CG breakdown: non-positive diagonal entry (matrix is indefinite)");
    d = 1.0 / d;
  }
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), kp(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double best = 1.0;
  int since_best = 0;
  for (int it = 1; it <= max_iter; ++it) {
    k.multiply(p, kp);
    const double curvature = dot(p, kp);
    if (!(curvature > 0.0)) {
      throw NumericalError("CG breakdown at iteration " + std::to_string(it) + ": non-positive curvature");
    }
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      rep.x[i] += alpha * p[i];
      r[i] -= alpha * kp[i];
    }
    rep.iterations = it;
    rep.relative_residual = norm2(r) / nb;
    if (rep.relative_residual <= tol) return rep;
    if (rep.relative_residual < 0.5 * best) {
      best = rep.relative_residual;
      since_best = 0;
    } else if (++since_best > std::max<int>(200, static_cast<int>(n))) {
      throw NumericalError("CG stalled at relative residual " + std::to_string(rep.relative_residual));
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericalError("CG did not converge in " + std::to_string(max_iter) + " iterations (residual " +
                       std::to_string(rep.relative_residual) + ")");
}

}  // namespace homolab
