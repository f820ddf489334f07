// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/onedim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "homolab/assembly.hpp"
#include "homolab/diagnostics.hpp"
#include "homolab/error.hpp"
#include "homolab/experiments.hpp"

namespace homolab {

namespace {

constexpr std::array<double, 4> kGaussX{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};
constexpr std::array<double, 4> kGaussW{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                        0.3478548451374538};

bool closed_form(const CoefficientField& f) {
  return f.has_inverse_primitive() || f.kind() == FieldKind::constant;
}

double scalar_a(const CoefficientField& f, double y) { return f.evaluate({y, 0.0})(0, 0); }

// int_{y1}^{y2} dt / a(t), y1 <= y2, using the primitive on [0, 1] and periodicity.
double inverse_integral(const CoefficientField& f, double y1, double y2) {
  const double p1 = f.inverse_primitive(1.0) - f.inverse_primitive(0.0);
  const double c1 = std::floor(y1), c2 = std::floor(y2);
  const double f1 = y1 - c1, f2 = y2 - c2;
  if (c1 == c2) return f.inverse_primitive(f2) - f.inverse_primitive(f1);
  return (f.inverse_primitive(1.0) - f.inverse_primitive(f1)) + (c2 - c1 - 1.0) * p1 +
         (f.inverse_primitive(f2) - f.inverse_primitive(0.0));
}

double gauss_inverse_integral(const CoefficientField& f, double y1, double y2) {
  const double mid = 0.5 * (y1 + y2), half = 0.5 * (y2 - y1);
  double s = 0.0;
  for (int q = 0; q < 4; ++q) s += kGaussW[q] / scalar_a(f, mid + half * kGaussX[q]);
  return s * half;
}

struct Pencil {
  // Interior dofs 1..n-1 mapped to 0..n-2.
  std::vector<double> kd, ke, md, me;
  std::vector<double> k_el;
  double h = 0.0;
};

Pencil build_pencil(const OneDimProblem& p) {
  Pencil pen;
  pen.k_el = element_stiffness_1d(p);
  pen.h = p.h();
  const int m = p.n - 1;
  pen.kd.resize(m);
  pen.md.assign(m, 4.0 * pen.h / 6.0);
  pen.ke.resize(std::max(m - 1, 0));
  pen.me.assign(std::max(m - 1, 0), pen.h / 6.0);
  for (int i = 0; i < m; ++i) pen.kd[i] = pen.k_el[i] + pen.k_el[i + 1];
  for (int i = 0; i + 1 < m; ++i) pen.ke[i] = -pen.k_el[i + 1];
  return pen;
}

int sturm_count(const Pencil& pen, double sigma) {
  int neg = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < pen.kd.size(); ++i) {
    const double d = pen.kd[i] - sigma * pen.md[i];
    if (i == 0) {
      q = d;
    } else {
      const double e = pen.ke[i - 1] - sigma * pen.me[i - 1];
      q = d - e * e / q;
    }
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++neg;
  }
  return neg;
}

void tri_multiply(const std::vector<double>& d, const std::vector<double>& e, const std::vector<double>& x,
                  std::vector<double>& y) {
  const std::size_t m = d.size();
  y.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = d[i] * x[i];
    if (i > 0) s += e[i - 1] * x[i - 1];
    if (i + 1 < m) s += e[i] * x[i + 1];
    y[i] = s;
  }
}

// Solves the symmetric tridiagonal system (d, e) x = b by Gaussian elimination
// with partial pivoting; exact zero pivots are nudged (inverse iteration).
std::vector<double> tri_solve(const std::vector<double>& d_in, const std::vector<double>& e_in,
                              std::vector<double> b) {
  const std::size_t m = d_in.size();
  std::vector<double> d = d_in, dl = e_in, du = e_in, du2(m > 2 ? m - 2 : 0, 0.0);
  double scale = 0.0;
  for (double v : d_in) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1e-300) * 1e-300;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
      if (i + 2 < m) du2[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      if (i + 2 < m) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = tmp;
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
    }
  }
  if (m > 0 && d[m - 1] == 0.0) d[m - 1] = tiny;
  std::vector<double> x(m);
  for (std::size_t ii = m; ii-- > 0;) {
    double s = b[ii];
    if (ii + 1 < m) s -= du[ii] * x[ii + 1];
    if (ii + 2 < m) s -= du2[ii] * x[ii + 2];
    x[ii] = s / d[ii];
  }
  return x;
}

double tri_inf_norm(const std::vector<double>& d, const std::vector<double>& e) {
  double best = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = std::abs(d[i]);
    if (i > 0) s += std::abs(e[i - 1]);
    if (i < e.size()) s += std::abs(e[i]);
    best = std::max(best, s);
  }
  return best;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

EigenPair solve_index(const Pencil& pen, int k, double upper, double tol) {
  double lo = 0.0, hi = upper;
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(pen, mid) >= k) hi = mid;
    else lo = mid;
  }
  const double sigma = 0.5 * (lo + hi);
  const std::size_t m = pen.kd.size();
  std::vector<double> td(m), te(pen.ke.size());
  for (std::size_t i = 0; i < m; ++i) td[i] = pen.kd[i] - sigma * pen.md[i];
  for (std::size_t i = 0; i < te.size(); ++i) te[i] = pen.ke[i] - sigma * pen.me[i];

  std::mt19937_64 rng(20240601ULL + static_cast<std::uint64_t>(k));
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double noise = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
    x[i] = std::sin(k * std::numbers::pi * (i + 1.0) / (m + 1.0)) + 1e-3 * noise;
  }
  const double k_norm = tri_inf_norm(pen.kd, pen.ke), m_norm = tri_inf_norm(pen.md, pen.me);
  EigenPair pair;
  std::vector<double> mx, kx;
  for (int it = 0; it < 12; ++it) {
    tri_multiply(pen.md, pen.me, x, mx);
    x = tri_solve(td, te, mx);
    tri_multiply(pen.md, pen.me, x, mx);
    const double nrm = std::sqrt(dot(x, mx));
    for (auto& v : x) v /= nrm;
    tri_multiply(pen.kd, pen.ke, x, kx);
    tri_multiply(pen.md, pen.me, x, mx);
    pair.lambda = dot(x, kx) / dot(x, mx);
    double r2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = kx[i] - pair.lambda * mx[i];
      r2 += r * r;
    }
    pair.residual = std::sqrt(r2) / ((k_norm + std::abs(pair.lambda) * m_norm) * std::sqrt(dot(x, x)));
    if (it >= 1 && pair.residual <= tol) break;
  }
  pair.vector.assign(m + 2, 0.0);
  std::copy(x.begin(), x.end(), pair.vector.begin() + 1);
  // Fix the sign so the first nonzero slope is positive.
  for (std::size_t i = 1; i + 1 < pair.vector.size(); ++i) {
    if (std::abs(pair.vector[i]) > 1e-12) {
      if (pair.vector[i] < 0.0)
        for (auto& v : pair.vector) v = -v;
      break;
    }
  }
  return pair;
}

}  // namespace

double OneDimProblem::coefficient_at(double x) const {
  if (eps == 0.0) return a_bar;
  return scalar_a(field, x / eps);
}

OneDimProblem make_1d_problem(const CoefficientField& field, double eps, int n) {
  if (field.dim() != 1) throw InvalidArgument("1D problem needs a field of dimension 1");
  if (!(eps >= 0.0)) throw InvalidArgument("1D problem needs eps >= 0");
  if (n < 2) throw InvalidArgument("1D problem needs at least 2 cells");
  OneDimProblem p{field, eps, n, 0.0};
  if (closed_form(field)) {
    p.a_bar = 1.0 / (field.inverse_primitive(1.0) - field.inverse_primitive(0.0));
  } else {
    constexpr int pieces = 256;
    double s = 0.0;
    for (int i = 0; i < pieces; ++i) s += gauss_inverse_integral(field, double(i) / pieces, double(i + 1) / pieces);
    p.a_bar = 1.0 / s;
  }
  if (eps > 0.0 && !resolves_oscillation(eps, n))
    warn("1D mesh with " + std::to_string(n) + " cells does not resolve eps = " + std::to_string(eps));
  return p;
}

OneDimProblem homogenized_1d(const OneDimProblem& problem) {
  OneDimProblem p = problem;
  p.eps = 0.0;
  return p;
}

int resonance_cells(double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("resonance_cells needs eps > 0");
  return std::max(4096, static_cast<int>(std::ceil(64.0 / eps - 1e-9)));
}

std::vector<double> element_stiffness_1d(const OneDimProblem& p) {
  const double h = p.h();
  std::vector<double> k(p.n);
  if (p.eps == 0.0) {
    std::fill(k.begin(), k.end(), p.a_bar / h);
    return k;
  }
  const bool exact = closed_form(p.field);
  for (int e = 0; e < p.n; ++e) {
    const double y1 = e * h / p.eps, y2 = (e + 1) * h / p.eps;
    const double integral =
        p.eps * (exact ? inverse_integral(p.field, y1, y2) : gauss_inverse_integral(p.field, y1, y2));
    k[e] = 1.0 / integral;
  }
  return k;
}

int count_below_1d(const OneDimProblem& problem, double sigma) { return sturm_count(build_pencil(problem), sigma); }

std::vector<EigenPair> solve_1d_spectrum(const OneDimProblem& problem, int count, double tol, int jobs) {
  if (count < 1) throw InvalidArgument("1D spectrum: count must be positive");
  if (problem.n < 64 * count)
    throw InvalidArgument("1D spectrum: " + std::to_string(count) + " eigenpairs need n >= " +
                          std::to_string(64 * count) + " cells");
  const Pencil pen = build_pencil(problem);
  const double upper = 12.0 * *std::max_element(pen.k_el.begin(), pen.k_el.end()) / pen.h * 1.01;
  std::vector<EigenPair> out(count);
  run_work_queue(jobs, static_cast<std::size_t>(count),
                 [&](std::size_t i) { out[i] = solve_index(pen, static_cast<int>(i) + 1, upper, tol); });
  std::vector<EigenPair> bad;
  for (const auto& p : out)
    if (!(p.residual <= tol)) bad.push_back(p);
  if (!bad.empty())
    throw EigenConvergenceError("1D inverse iteration did not reach tolerance for " + std::to_string(bad.size()) +
                                    " eigenpairs",
                                out);
  return out;
}

double endpoint_flux(const EigenPair& pair, const OneDimProblem& problem) {
  const auto& u = pair.vector;
  if (u.size() != static_cast<std::size_t>(problem.n) + 1)
    throw InvalidArgument("endpoint_flux: vector does not match the mesh");
  const auto k = element_stiffness_1d(problem);
  const double h = problem.h(), lam = pair.lambda;
  const std::size_t n = static_cast<std::size_t>(problem.n);
  // Residuals of the discrete equation at the two boundary nodes give a u'.
  const double r0 = k[0] * (u[0] - u[1]) - lam * h / 6.0 * (2.0 * u[0] + u[1]);
  const double r1 = k[n - 1] * (u[n] - u[n - 1]) - lam * h / 6.0 * (2.0 * u[n] + u[n - 1]);
  const double d0 = -r0 / problem.coefficient_at(0.0);
  const double d1 = r1 / problem.coefficient_at(1.0);
  return d0 * d0 + d1 * d1;
}

ResonanceScan resonance_scan(const CoefficientField& field, double eps, double eps2_min, double eps2_max, int n,
                             double tol, int jobs) {
  if (!(eps > 0.0)) throw InvalidArgument("resonance scan needs eps > 0");
  if (!(eps2_max > eps2_min) || eps2_min < 0.0) throw InvalidArgument("resonance scan: bad eps^2 lambda range");
  if (n == 0) n = resonance_cells(eps);
  if (n < 32.0 / eps)
    throw InvalidArgument("insufficient resolution: resonance scan at eps = " + std::to_string(eps) + " needs n >= " +
                          std::to_string(static_cast<int>(std::ceil(32.0 / eps))));
  const OneDimProblem problem = make_1d_problem(field, eps, n);
  const double lam_max = eps2_max / (eps * eps);
  const int count = count_below_1d(problem, lam_max);
  ResonanceScan scan;
  scan.n = n;
  scan.a_bar = problem.a_bar;
  if (count == 0) return scan;
  if (n < 64 * count)
    throw InvalidArgument("insufficient resolution: " + std::to_string(count) + " eigenvalues below eps^-2 * " +
                          std::to_string(eps2_max) + " need n >= " + std::to_string(64 * count));
  const auto pairs = solve_1d_spectrum(problem, count, tol, jobs);
  double best = -1.0;
  for (int i = 0; i < count; ++i) {
    ResonanceRow row;
    row.eps = eps;
    row.k = i + 1;
    row.lambda = pairs[i].lambda;
    row.eps2_lambda = eps * eps * row.lambda;
    if (row.eps2_lambda < eps2_min) continue;
    row.flux = endpoint_flux(pairs[i], problem);
    row.flux_over_lambda = row.flux / row.lambda;
    row.flux_over_lambda_1p5 = row.flux / std::pow(row.lambda, 1.5);
    if (row.flux_over_lambda > best) {
      best = row.flux_over_lambda;
      scan.argmax_flux_over_lambda = scan.rows.size();
    }
    scan.rows.push_back(row);
  }
  return scan;
}

}  // namespace homolab
