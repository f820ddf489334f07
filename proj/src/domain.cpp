// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homolab/assembly.hpp"
#include "homolab/diagnostics.hpp"
#include "homolab/error.hpp"

namespace homolab {

namespace {

struct GaussTable {
  Quadrature quad;
  std::vector<ShapeValues> shapes;
  explicit GaussTable(int dim) : quad(Quadrature::gauss2(dim)) {
    for (const auto& xi : quad.points) shapes.push_back(shape_functions(dim, xi));
  }
};

double interpolate_at(const DomainGrid& grid, const std::vector<double>& u, std::size_t e, const ShapeValues& s) {
  const auto en = grid.element_nodes(e);
  double v = 0.0;
  for (int a = 0; a < grid.nodes_per_element(); ++a) v += s.value[a] * u[en[a]];
  return v;
}

}  // namespace

DomainOperator DomainOperator::oscillating(CoefficientField field, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("oscillating operator needs eps > 0");
  return DomainOperator(std::move(field), eps, "oscillating");
}

DomainOperator DomainOperator::homogenized(int dim, const Mat2& a_hat) {
  return DomainOperator(CoefficientField::constant_tensor(dim, a_hat), 0.0, "homogenized");
}

Mat2 DomainOperator::coefficient_at(const Point& x) const {
  if (eps_ > 0.0) return field_.evaluate(Point{x[0] / eps_, x[1] / eps_});
  return field_.evaluate(x);
}

std::array<Mat2, 2> DomainOperator::coefficient_gradient_at(const Point& x) const {
  if (!(eps_ > 0.0)) return {};
  auto g = field_.gradient(Point{x[0] / eps_, x[1] / eps_});
  for (auto& m : g)
    for (auto& v : m.v) v /= eps_;
  return g;
}

SparseSymMatrix DomainOperator::stiffness_full(const DomainGrid& grid) const {
  return assemble_stiffness_domain_full(field_, eps_ > 0.0 ? eps_ : 1.0, grid);
}

DomainSystem::DomainSystem(const DomainOperator& op, const DomainGrid& grid) : op_(op), grid_(grid) {
  if (op.dim() != grid.dim()) throw InvalidArgument("operator and grid dimensions differ");
  if (op.is_oscillating() && op.field().kind() != FieldKind::constant && !resolves_oscillation(op.eps(), grid.n())) {
    std::ostringstream msg;
    msg << "mesh h = 1/" << grid.n() << " does not resolve eps = " << op.eps() << " (need h <= eps/8)";
    warn(msg.str());
  }
  k_full_ = op.stiffness_full(grid);
  k_ = restrict_to_interior(k_full_, grid);
  m_full_ = assemble_mass(grid);
  m_ = restrict_to_interior(m_full_, grid);
}

double l2_norm(const DomainSystem& system, const std::vector<double>& u_full) {
  return std::sqrt(std::max(0.0, system.mass_full().quadratic_form(u_full, u_full)));
}

std::vector<double> solve_source(const DomainSystem& system, const std::vector<double>& f_full,
                                 const SolveOptions& options) {
  const auto& grid = system.grid();
  if (f_full.size() != grid.num_nodes()) throw InvalidArgument("solve_source: f must be a full nodal vector");
  for (double v : f_full)
    if (!std::isfinite(v)) throw InvalidArgument("solve_source: f is not finite");
  const auto load = grid.restrict_to_interior(system.mass_full() * f_full);
  const auto rep = factor_solve(system.stiffness(), load, options);
  return grid.expand(rep.x);
}

DirichletCorrector dirichlet_corrector(const DomainSystem& system, const SolveOptions& options) {
  const auto& grid = system.grid();
  const int d = grid.dim();
  DirichletCorrector out;
  out.eps = system.op().eps();
  out.min_value = 1.0;
  out.max_value = 0.0;

  std::vector<std::int64_t> boundary_index(grid.num_nodes(), -1);
  std::vector<std::int64_t> interior_index(grid.num_nodes(), -1);
  for (std::size_t b = 0; b < grid.boundary_nodes().size(); ++b)
    boundary_index[grid.boundary_nodes()[b]] = static_cast<std::int64_t>(b);
  for (std::size_t v = 0; v < grid.num_nodes(); ++v) interior_index[v] = grid.interior_index(v);

  const CholeskyFactor factor(system.stiffness());
  for (int j = 0; j < d; ++j) {
    std::vector<double> g(grid.boundary_nodes().size());
    for (std::size_t b = 0; b < g.size(); ++b) g[b] = grid.node_coordinates(grid.boundary_nodes()[b])[j];
    std::vector<double> rhs(grid.num_interior(), 0.0);
    system.stiffness_full().multiply_block(interior_index, boundary_index, g, rhs);
    for (auto& v : rhs) v = -v;

    std::vector<double> x = factor.solve(rhs);
    std::vector<double> r(rhs.size());
    const double nb = norm2(rhs);
    for (int sweep = 0; nb > 0.0 && sweep < 3; ++sweep) {
      system.stiffness().multiply(x, r);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
      if (norm2(r) <= options.tol * nb) break;
      const auto dx = factor.solve(r);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }

    std::vector<double> phi = grid.expand(x);
    for (std::size_t b = 0; b < g.size(); ++b) phi[grid.boundary_nodes()[b]] = g[b];
    for (std::size_t v = 0; v < phi.size(); ++v) {
      out.deviation_sup = std::max(out.deviation_sup, std::abs(phi[v] - grid.node_coordinates(v)[j]));
      out.min_value = std::min(out.min_value, phi[v]);
      out.max_value = std::max(out.max_value, phi[v]);
    }
    out.phi.push_back(std::move(phi));
  }
  return out;
}

ApproximationReport corrector_approximation(const DomainGrid& grid, const std::vector<double>& u_eps,
                                            const std::vector<double>& u_0, const DirichletCorrector& corrector,
                                            double f_norm) {
  const int d = grid.dim();
  if (u_eps.size() != grid.num_nodes() || u_0.size() != grid.num_nodes() ||
      corrector.phi.size() != static_cast<std::size_t>(d)) {
    throw InvalidArgument("corrector_approximation: inputs do not match the grid");
  }
  const auto grad_u0 = recover_nodal_gradient(grid, u_0);
  std::vector<double> w(grid.num_nodes());
  for (std::size_t v = 0; v < w.size(); ++v) {
    const auto x = grid.node_coordinates(v);
    double c = 0.0;
    for (int j = 0; j < d; ++j) c += (corrector.phi[j][v] - x[j]) * grad_u0[j][v];
    w[v] = u_eps[v] - u_0[v] - c;
  }
  std::vector<double> diff(grid.num_nodes());
  for (std::size_t v = 0; v < diff.size(); ++v) diff[v] = u_eps[v] - u_0[v];

  const GaussTable g(d);
  const double volume = std::pow(grid.h(), d);
  double w_l2 = 0.0, w_h1 = 0.0, diff_l2 = 0.0, grad_err = 0.0;
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    for (std::size_t q = 0; q < g.quad.size(); ++q) {
      const double wt = g.quad.weights[q] * volume;
      const auto& xi = g.quad.points[q];
      const double wq = interpolate_at(grid, w, e, g.shapes[q]);
      const double dq = interpolate_at(grid, diff, e, g.shapes[q]);
      const auto gw = element_gradient(grid, w, e, xi);
      auto gu = element_gradient(grid, u_eps, e, xi);
      for (int j = 0; j < d; ++j) {
        const double du0 = interpolate_at(grid, grad_u0[j], e, g.shapes[q]);
        const auto gphi = element_gradient(grid, corrector.phi[j], e, xi);
        for (int i = 0; i < d; ++i) gu[i] -= gphi[i] * du0;
      }
      w_l2 += wt * wq * wq;
      diff_l2 += wt * dq * dq;
      for (int i = 0; i < d; ++i) {
        w_h1 += wt * gw[i] * gw[i];
        grad_err += wt * gu[i] * gu[i];
      }
    }
  }
  ApproximationReport rep;
  rep.eps = corrector.eps;
  rep.h = grid.h();
  rep.h1_error = std::sqrt(w_l2 + w_h1);
  rep.l2_error = std::sqrt(diff_l2);
  rep.grad_error = std::sqrt(grad_err);
  rep.f_norm = f_norm;
  return rep;
}

std::vector<EigenPair> eigen_spectrum(const DomainSystem& system, int count, const EigenOptions& options) {
  auto pairs = smallest_eigenpairs(system.stiffness(), system.mass(), count, options);
  for (auto& p : pairs) p.vector = system.grid().expand(p.vector);
  return pairs;
}

SpectralProjection spectral_projection(const DomainSystem& system, const std::vector<EigenPair>& spectrum,
                                       const std::vector<double>& f_full, double lam) {
  if (!(lam >= 1.0)) throw InvalidArgument("spectral_projection: lam must be >= 1");
  const auto& grid = system.grid();
  if (f_full.size() != grid.num_nodes()) throw InvalidArgument("spectral_projection: f must be a full nodal vector");
  const double lo = std::sqrt(lam);
  const double hi = lo + 1.0;
  if (spectrum.empty() || std::sqrt(spectrum.back().lambda) < hi) {
    std::ostringstream msg;
    msg << "incomplete spectrum: window [" << lo << ", " << hi << ") in sqrt(lambda) extends past the largest "
        << "computed eigenvalue";
    throw NumericalError(msg.str());
  }
  SpectralProjection out;
  out.projection.assign(f_full.size(), 0.0);
  out.remainder.assign(f_full.size(), 0.0);
  const auto mf = system.mass_full() * f_full;
  for (const auto& pair : spectrum) {
    const double s = std::sqrt(pair.lambda);
    if (s < lo || s >= hi) continue;
    const double c = dot(pair.vector, mf);
    for (std::size_t i = 0; i < f_full.size(); ++i) {
      out.projection[i] += c * pair.vector[i];
      out.remainder[i] += (pair.lambda - lam) * c * pair.vector[i];
    }
    ++out.window_count;
  }
  out.f_norm = l2_norm(system, f_full);
  out.projection_norm = l2_norm(system, out.projection);
  out.remainder_norm = l2_norm(system, out.remainder);
  out.remainder_constant = out.f_norm > 0.0 ? out.remainder_norm / (lo * out.f_norm) : 0.0;
  return out;
}

}  // namespace homolab
