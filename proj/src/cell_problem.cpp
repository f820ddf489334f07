// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/cell_problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "homolab/assembly.hpp"
#include "homolab/error.hpp"
#include "homolab/linear_solver.hpp"

namespace homolab {

namespace {

// Solves the singular periodic system K x_c = rhs_c for every column with dof 0
// pinned, then removes the mean. Columns whose entries are all below
// `roundoff` are treated as exact zeros. Returns the largest relative residual.
double solve_periodic(const SparseSymMatrix& k, std::vector<std::vector<double>>& rhs_in_solution_out, double tol,
                      double roundoff) {
  const std::size_t n = k.dim();
  std::vector<std::size_t> active;
  for (auto& col : rhs_in_solution_out) {
    // Compatibility with the constant kernel.
    double s = 0.0;
    for (double v : col) s += v;
    for (auto& v : col) v -= s / static_cast<double>(n);
  }
  for (std::size_t c = 0; c < rhs_in_solution_out.size(); ++c) {
    double peak = 0.0;
    for (double v : rhs_in_solution_out[c]) peak = std::max(peak, std::abs(v));
    if (peak > roundoff) {
      active.push_back(c);
    } else {
      std::fill(rhs_in_solution_out[c].begin(), rhs_in_solution_out[c].end(), 0.0);
    }
  }
  if (active.empty()) return 0.0;

  const CholeskyFactor factor(k.without_dof(0));
  double k_norm = 0.0;  // infinity norm
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t q = k.row_offsets()[i]; q < k.row_offsets()[i + 1]; ++q) row += std::abs(k.values()[q]);
    k_norm = std::max(k_norm, row);
  }
  double worst = 0.0;
  for (auto c : active) {
    auto& col = rhs_in_solution_out[c];
    const std::vector<double> b = col;
    std::vector<double> reduced(b.begin() + 1, b.end());
    std::vector<double> x(n, 0.0);
    std::vector<double> r(n);
    double rel = 0.0;
    for (int sweep = 0; sweep < 4; ++sweep) {
      const auto dx = factor.solve(reduced);
      for (std::size_t i = 1; i < n; ++i) x[i] += dx[i - 1];
      k.multiply(x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      rel = norm2(r) / norm2(b);
      // Accept at the roundoff floor of the factorization as well.
      if (rel <= tol || norm2(r) <= 1e-13 * k_norm * norm2(x)) break;
      reduced.assign(r.begin() + 1, r.end());
    }
    if (rel > tol && norm2(r) > 1e-13 * k_norm * norm2(x)) {
      throw NumericalError("periodic cell solve residual " + std::to_string(rel) + " exceeds tolerance");
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    for (auto& v : x) v -= mean;
    col = std::move(x);
    worst = std::max(worst, rel);
  }
  return worst;
}

struct GaussData {
  Quadrature quad;
  std::vector<ShapeValues> shapes;
};

GaussData gauss_data(int dim) {
  GaussData g{Quadrature::gauss2(dim), {}};
  for (const auto& xi : g.quad.points) g.shapes.push_back(shape_functions(dim, xi));
  return g;
}

Point physical_point(const TorusGrid& grid, std::size_t e, const Point& xi) {
  const auto o = grid.element_origin(e);
  return {(o[0] + xi[0]) * grid.h(), grid.dim() == 2 ? (o[1] + xi[1]) * grid.h() : 0.0};
}

}  // namespace

double CorrectorSet::mean(int j) const {
  const auto& c = chi.at(static_cast<std::size_t>(j));
  double s = 0.0;
  for (double v : c) s += v;
  return s / static_cast<double>(c.size());
}

double CorrectorSet::max_abs() const {
  double m = 0.0;
  for (const auto& c : chi)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

Mat2 BField::mean() const {
  const auto q = Quadrature::gauss2(grid.dim());
  const double cell = std::pow(grid.h(), grid.dim());
  Mat2 m;
  const std::size_t p = points_per_element();
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double w = q.weights[idx % p] * cell;
    for (int k = 0; k < 4; ++k) m.v[k] += w * values[idx].v[k];
  }
  return m;
}

double BField::max_abs() const {
  double m = 0.0;
  for (const auto& b : values)
    for (double v : b.v) m = std::max(m, std::abs(v));
  return m;
}

double FluxCorrector::antisymmetry_defect() const {
  const int d = grid.dim();
  double defect = 0.0;
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (std::size_t v = 0; v < grid.num_dofs(); ++v)
          defect = std::max(defect, std::abs(flux[k][i][j][v] + flux[i][k][j][v]));
  return defect;
}

CorrectorSet solve_correctors(const CoefficientField& field, const TorusGrid& grid, double tol) {
  if (field.dim() != grid.dim()) throw InvalidArgument("field and grid dimensions differ");
  const auto k = assemble_stiffness_torus(field, grid);
  std::vector<std::vector<double>> columns;
  for (int j = 0; j < grid.dim(); ++j) columns.push_back(assemble_cell_load(field, grid, j));
  const double load_scale = std::pow(grid.h(), grid.dim() - 1) / field.kappa();
  const double residual = solve_periodic(k, columns, tol, 1e-13 * load_scale);
  return CorrectorSet{grid, std::move(columns), residual};
}

HomogenizedTensor homogenized_tensor(const CoefficientField& field, const CorrectorSet& correctors) {
  const auto& grid = correctors.grid;
  const int d = grid.dim();
  const auto g = gauss_data(d);
  const double cell = std::pow(grid.h(), d);
  HomogenizedTensor out;
  out.dim = d;
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    for (std::size_t q = 0; q < g.quad.size(); ++q) {
      const Mat2 a = field.evaluate(physical_point(grid, e, g.quad.points[q]));
      const double w = g.quad.weights[q] * cell;
      for (int j = 0; j < d; ++j) {
        const auto grad = element_gradient(grid, correctors.chi[j], e, g.quad.points[q]);
        for (int i = 0; i < d; ++i) {
          double v = a(i, j);
          for (int kk = 0; kk < d; ++kk) v += a(i, kk) * grad[kk];
          out.a_hat(i, j) += w * v;
        }
      }
    }
  }
  return out;
}

BField b_field(const CoefficientField& field, const CorrectorSet& correctors, const HomogenizedTensor& a_hat) {
  const auto& grid = correctors.grid;
  const int d = grid.dim();
  const auto g = gauss_data(d);
  BField b{grid, {}};
  b.values.reserve(grid.num_elements() * g.quad.size());
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    for (std::size_t q = 0; q < g.quad.size(); ++q) {
      const Mat2 a = field.evaluate(physical_point(grid, e, g.quad.points[q]));
      Mat2 bq;
      for (int j = 0; j < d; ++j) {
        const auto grad = element_gradient(grid, correctors.chi[j], e, g.quad.points[q]);
        for (int i = 0; i < d; ++i) {
          double v = a_hat.a_hat(i, j) - a(i, j);
          for (int kk = 0; kk < d; ++kk) v -= a(i, kk) * grad[kk];
          bq(i, j) = v;
        }
      }
      b.values.push_back(bq);
    }
  }
  return b;
}

FluxCorrector flux_corrector(const BField& b, double tol) {
  const auto& grid = b.grid;
  const int d = grid.dim();
  const auto g = gauss_data(d);
  const double cell = std::pow(grid.h(), d);
  const std::size_t n = grid.num_dofs();
  const std::size_t p = b.points_per_element();

  // Load of -Laplace f = -b: rhs_l = -int b_ij phi_l.
  std::vector<std::vector<double>> columns(static_cast<std::size_t>(d * d), std::vector<double>(n, 0.0));
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto dofs = grid.element_dofs(e);
    for (std::size_t q = 0; q < p; ++q) {
      const Mat2& bq = b.values[e * p + q];
      const double w = g.quad.weights[q] * cell;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int a = 0; a < grid.nodes_per_element(); ++a)
            columns[static_cast<std::size_t>(i * d + j)][dofs[a]] -= w * bq(i, j) * g.shapes[q].value[a];
    }
  }
  const auto laplacian = assemble_stiffness_torus(CoefficientField::constant(d, 1.0), grid);
  solve_periodic(laplacian, columns, tol, 1e-13 * cell * std::max(b.max_abs(), 1.0));

  FluxCorrector out{grid, {}, {}, 0.0};
  std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> grad_f;  // grad_f[i][j][k] = d_k f_ij
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out.f[i][j] = std::move(columns[static_cast<std::size_t>(i * d + j)]);
      auto gr = recover_nodal_gradient(grid, out.f[i][j]);
      for (int k = 0; k < d; ++k) grad_f[i][j][k] = std::move(gr[k]);
    }
  }
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        auto& fkij = out.flux[k][i][j];
        fkij.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
          fkij[v] = grad_f[i][j][k][v] - grad_f[k][j][i][v];
          out.max_abs = std::max(out.max_abs, std::abs(fkij[v]));
        }
      }
    }
  }
  return out;
}

double weak_divergence_residual(const FluxCorrector& flux, const BField& b) {
  const auto& grid = flux.grid;
  const int d = grid.dim();
  const auto g = gauss_data(d);
  const double cell = std::pow(grid.h(), d);
  const std::size_t p = b.points_per_element();
  const std::size_t n = grid.num_dofs();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  // L2 norm of the largest b component.
  std::array<double, 4> b_sq{};
  for (std::size_t e = 0; e < grid.num_elements(); ++e)
    for (std::size_t q = 0; q < p; ++q)
      for (int c = 0; c < 4; ++c) b_sq[c] += g.quad.weights[q] * cell * b.values[e * p + q].v[c] * b.values[e * p + q].v[c];
  const double b_norm = std::sqrt(*std::max_element(b_sq.begin(), b_sq.end()));
  if (b_norm == 0.0) return 0.0;

  std::vector<std::array<int, 2>> modes{{1, 0}, {2, 0}};
  if (d == 2) modes = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}};
  double worst = 0.0;
  for (const auto& mode : modes) {
    for (int phase = 0; phase < 2; ++phase) {
      std::vector<double> v(n);
      for (std::size_t dof = 0; dof < n; ++dof) {
        const auto y = grid.node_coordinates(dof);
        const double arg = two_pi * (mode[0] * y[0] + mode[1] * y[1]);
        v[dof] = phase == 0 ? std::cos(arg) : std::sin(arg);
      }
      double grad_v_sq = 0.0;
      std::array<double, 4> acc{};
      for (std::size_t e = 0; e < grid.num_elements(); ++e) {
        const auto dofs = grid.element_dofs(e);
        for (std::size_t q = 0; q < p; ++q) {
          const auto& s = g.shapes[q];
          const double w = g.quad.weights[q] * cell;
          const auto gv = element_gradient(grid, v, e, g.quad.points[q]);
          double vq = 0.0;
          for (int a = 0; a < grid.nodes_per_element(); ++a) vq += s.value[a] * v[dofs[a]];
          grad_v_sq += w * (gv[0] * gv[0] + gv[1] * gv[1]);
          const Mat2& bq = b.values[e * p + q];
          for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
              double term = bq(i, j) * vq;
              for (int k = 0; k < d; ++k) {
                double fq = 0.0;
                for (int a = 0; a < grid.nodes_per_element(); ++a) fq += s.value[a] * flux.flux[k][i][j][dofs[a]];
                term += fq * gv[k];
              }
              acc[static_cast<std::size_t>(i * 2 + j)] += w * term;
            }
          }
        }
      }
      const double denom = b_norm * std::sqrt(grad_v_sq);
      for (double a : acc) worst = std::max(worst, std::abs(a) / denom);
    }
  }
  return worst;
}

HomogenizedTensor compute_homogenized(const CoefficientField& field, int n, double tol) {
  const TorusGrid grid(field.dim(), n);
  return homogenized_tensor(field, solve_correctors(field, grid, tol));
}

}  // namespace homolab
