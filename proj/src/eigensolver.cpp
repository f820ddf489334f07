// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>

#include "homolab/linear_solver.hpp"

namespace homolab {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

std::span<const double> col_span(const Mat& a, Eigen::Index j) {
  return {a.col(j).data(), static_cast<std::size_t>(a.rows())};
}

std::span<double> col_span(Mat& a, Eigen::Index j) { return {a.col(j).data(), static_cast<std::size_t>(a.rows())}; }

class ShiftInvert {
 public:
  ShiftInvert(const SparseSymMatrix& k, const SparseSymMatrix& m) : m_(m), factor_(k) {}

  void apply_m(const Mat& x, Mat& y) const {
    y.resize(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) m_.multiply(col_span(x, j), col_span(y, j));
  }

  void apply_m_vec(const Eigen::Ref<const Vec>& x, Vec& y) const {
    y.resize(x.size());
    const auto n = static_cast<std::size_t>(x.size());
    m_.multiply({x.data(), n}, {y.data(), n});
  }

  /// y = K^{-1} M x
  void apply(const Mat& x, Mat& y) const {
    Mat mx;
    apply_m(x, mx);
    y.resize(x.rows(), x.cols());
    const auto total = static_cast<std::size_t>(x.size());
    factor_.solve_block({mx.data(), total}, static_cast<std::size_t>(x.cols()), {y.data(), total});
  }

 private:
  const SparseSymMatrix& m_;
  CholeskyFactor factor_;
};

// Uniform in [-1, 1) from a 64-bit Mersenne twister; identical on every platform.
void fill_random(std::mt19937_64& rng, Eigen::Ref<Vec> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  }
}

class BlockOrthogonalizer {
 public:
  BlockOrthogonalizer(const ShiftInvert& op, std::mt19937_64& rng) : op_(op), rng_(rng) {}

  /// M-orthogonalizes the block W against basis.leftCols(m) (two passes,
  /// returning the accumulated coefficients in c) and then M-orthonormalizes
  /// it internally: W_in = basis * c + W_out * r. Rank-deficient columns are
  /// replaced by fresh random directions with a zero column in r.
  void run(const Mat& basis, Eigen::Index m, Mat& w, Mat& c, Mat& r) {
    const Eigen::Index p = w.cols();
    c.setZero(m, p);
    r.setZero(p, p);
    const Vec initial_norms = m_norms(w);
    project_out(basis, m, w, &c);
    Mat mw(w.rows(), p);
    for (Eigen::Index j = 0; j < p; ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) {
          const double coef = mw.col(i).dot(w.col(j));
          w.col(j) -= coef * w.col(i);
          r(i, j) += coef;
        }
      }
      Vec mj(w.rows());
      op_.apply_m_vec(w.col(j), mj);
      double nrm = std::sqrt(std::max(0.0, w.col(j).dot(mj)));
      if (!(nrm > 1e-10 * initial_norms[j])) {
        replace_with_random(basis, m, w, mw, j);
        op_.apply_m_vec(w.col(j), mj);
        nrm = std::sqrt(w.col(j).dot(mj));
        r(j, j) = 0.0;
      } else {
        r(j, j) = nrm;
      }
      w.col(j) /= nrm;
      mw.col(j) = mj / nrm;
    }
  }

 private:
  Vec m_norms(const Mat& w) const {
    Mat mw;
    op_.apply_m(w, mw);
    Vec n(w.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) n[j] = std::sqrt(std::max(0.0, w.col(j).dot(mw.col(j))));
    return n;
  }

  void project_out(const Mat& basis, Eigen::Index m, Mat& w, Mat* c) const {
    if (m == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
      Mat mw;
      op_.apply_m(w, mw);
      const Mat coef = basis.leftCols(m).transpose() * mw;
      w.noalias() -= basis.leftCols(m) * coef;
      if (c) *c += coef;
    }
  }

  void replace_with_random(const Mat& basis, Eigen::Index m, Mat& w, const Mat& mw, Eigen::Index j) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mat v(w.rows(), 1);
      fill_random(rng_, v.col(0));
      const double before = std::sqrt(v.col(0).squaredNorm());
      project_out(basis, m, v, nullptr);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index i = 0; i < j; ++i) v.col(0) -= mw.col(i).dot(v.col(0)) * w.col(i);
      if (v.col(0).norm() > 1e-6 * before) {
        w.col(j) = v.col(0);
        return;
      }
    }
    throw NumericalError("eigensolver: cannot extend the Krylov basis (space exhausted)");
  }

  const ShiftInvert& op_;
  std::mt19937_64& rng_;
};

}  // namespace

double eigen_residual(const SparseSymMatrix& k, const SparseSymMatrix& m, double lambda,
                      const std::vector<double>& x) {
  std::vector<double> kx = k * x;
  std::vector<double> mx = m * x;
  const double nmx = norm2(mx);
  for (std::size_t i = 0; i < kx.size(); ++i) kx[i] -= lambda * mx[i];
  const double denom = std::abs(lambda) * nmx;
  return denom > 0.0 ? norm2(kx) / denom : norm2(kx);
}

std::vector<EigenPair> smallest_eigenpairs(const SparseSymMatrix& k, const SparseSymMatrix& m, int count,
                                           const EigenOptions& options) {
  const auto n = static_cast<Eigen::Index>(k.dim());
  if (m.dim() != k.dim()) throw InvalidArgument("eigensolver: K and M differ in size");
  if (count < 1) throw InvalidArgument("eigensolver: count must be positive");
  if (static_cast<Eigen::Index>(count) * 4 > n) throw InvalidArgument("eigensolver: count exceeds dimension / 4");
  if (options.block_size < 1) throw InvalidArgument("eigensolver: block size must be positive");

  const Eigen::Index p = std::min<Eigen::Index>(options.block_size, n / 4 > 0 ? n / 4 : 1);
  Eigen::Index max_basis = options.max_basis > 0 ? options.max_basis
                                                 : std::max<Eigen::Index>(2 * count + 2 * p, count + 6 * p);
  max_basis = std::min<Eigen::Index>(max_basis, (n / p) * p);
  const Eigen::Index keep = std::min<Eigen::Index>(count + p, max_basis - 2 * p);
  if (keep < count) throw InvalidArgument("eigensolver: basis limit too small for the requested count");

  const ShiftInvert op(k, m);
  std::mt19937_64 rng(options.seed);
  BlockOrthogonalizer orth(op, rng);

  Mat basis(n, max_basis);
  Mat h = Mat::Zero(max_basis, max_basis);
  Mat q(n, p);
  for (Eigen::Index j = 0; j < p; ++j) fill_random(rng, q.col(j));
  {
    Mat c, r;
    orth.run(basis, 0, q, c, r);
  }
  Mat coupling = Mat::Zero(p, 0);  // T V = V H + Q coupling
  Eigen::Index dim_v = 0;
  double estimate_scale = 0.1;

  std::vector<EigenPair> current;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    basis.middleCols(dim_v, p) = q;
    h.block(dim_v, 0, p, dim_v) = coupling;
    h.block(0, dim_v, dim_v, p) = coupling.transpose();
    dim_v += p;

    Mat w;
    op.apply(q, w);
    Mat c, r;
    orth.run(basis, dim_v, w, c, r);
    h.block(0, dim_v - p, dim_v, p) = c;
    h.block(dim_v - p, 0, p, dim_v) = c.transpose();
    const Mat diag_block = h.block(dim_v - p, dim_v - p, p, p);
    h.block(dim_v - p, dim_v - p, p, p) = 0.5 * (diag_block + diag_block.transpose());
    q = w;

    Eigen::SelfAdjointEigenSolver<Mat> ritz(h.topLeftCorner(dim_v, dim_v));
    if (ritz.info() != Eigen::Success) throw NumericalError("eigensolver: projected eigenproblem failed");
    // Largest theta of K^{-1}M first.
    const Vec theta = ritz.eigenvalues().reverse();
    const Mat s = ritz.eigenvectors().rowwise().reverse();

    bool estimates_ok = true;
    for (int i = 0; i < count; ++i) {
      const double est = (r * s.block(dim_v - p, i, p, 1)).norm();
      if (!(theta[i] > 0.0) || est > estimate_scale * options.tol * theta[i]) {
        estimates_ok = false;
        break;
      }
    }

    const bool last = iter == options.max_iter;
    if (estimates_ok || last) {
      current.clear();
      bool all_ok = true;
      for (int i = 0; i < count; ++i) {
        Vec y = basis.leftCols(dim_v) * s.col(i);
        EigenPair pair;
        pair.vector.assign(y.data(), y.data() + n);
        const double ymy = m.quadratic_form(pair.vector, pair.vector);
        const double yky = k.quadratic_form(pair.vector, pair.vector);
        const double scale = 1.0 / std::sqrt(ymy);
        for (auto& v : pair.vector) v *= scale;
        pair.lambda = yky / ymy;
        pair.residual = eigen_residual(k, m, pair.lambda, pair.vector);
        all_ok = all_ok && pair.residual <= options.tol;
        current.push_back(std::move(pair));
      }
      std::stable_sort(current.begin(), current.end(),
                       [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
      if (all_ok) return current;
      estimate_scale *= 0.01;
    }

    if (dim_v + p > max_basis) {
      // Thick restart on the leading Ritz vectors, processed in row chunks to
      // avoid a second n x max_basis buffer.
      const Mat s_keep = s.leftCols(keep);
      constexpr Eigen::Index chunk = 8192;
      for (Eigen::Index row = 0; row < n; row += chunk) {
        const Eigen::Index rows = std::min(chunk, n - row);
        const Mat part = basis.block(row, 0, rows, dim_v) * s_keep;
        basis.block(row, 0, rows, keep) = part;
      }
      coupling = r * s.block(dim_v - p, 0, p, keep);
      h.setZero();
      for (Eigen::Index i = 0; i < keep; ++i) h(i, i) = theta[i];
      dim_v = keep;
    } else {
      coupling = Mat::Zero(p, dim_v);
      coupling.rightCols(p) = r;
    }
  }
  throw EigenConvergenceError("eigensolver did not reach tolerance " + std::to_string(options.tol) + " in " +
                                  std::to_string(options.max_iter) + " block steps",
                              std::move(current));
}

}  // namespace homolab
