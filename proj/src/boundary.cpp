// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "homolab/assembly.hpp"
#include "homolab/error.hpp"

namespace homolab {

namespace {

struct FacetPoint {
  Point x;       ///< physical location
  Point xi;      ///< reference coordinates in the adjacent element
  double t;      ///< position along the facet in [0, 1]
  double weight; ///< quadrature weight including the facet length
};

std::vector<FacetPoint> facet_points(const DomainGrid& grid, const BoundaryFacet& f) {
  const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double g1 = 0.5 + 0.5 / std::sqrt(3.0);
  const auto o = grid.element_origin(f.element);
  const double h = grid.h();
  const Point a = grid.node_coordinates(f.nodes[0]);
  const Point b = grid.node_coordinates(f.nodes[1]);
  std::vector<FacetPoint> pts;
  for (double t : {g0, g1}) {
    const Point x{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    pts.push_back({x, Point{x[0] / h - o[0], x[1] / h - o[1]}, t, 0.5 * h});
  }
  return pts;
}

// Boundary nodes of the unit square in counter-clockwise order from (0, 0).
std::vector<std::size_t> boundary_loop(const DomainGrid& grid) {
  const int n = grid.n();
  std::vector<std::size_t> loop;
  for (int i = 0; i < n; ++i) loop.push_back(grid.node(i, 0));
  for (int j = 0; j < n; ++j) loop.push_back(grid.node(n, j));
  for (int i = n; i > 0; --i) loop.push_back(grid.node(i, n));
  for (int j = n; j > 0; --j) loop.push_back(grid.node(0, j));
  return loop;
}

double normal_stiffness(const Mat2& a, const Point& n, int dim) {
  double v = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) v += n[i] * a(i, j) * n[j];
  return v;
}

}  // namespace

ConormalTrace recover_conormal(const DomainSystem& system, const std::vector<double>& u_full,
                               const std::vector<double>& load_full) {
  const auto& grid = system.grid();
  if (u_full.size() != grid.num_nodes() || load_full.size() != grid.num_nodes()) {
    throw InvalidArgument("recover_conormal: vectors must be full nodal vectors");
  }
  auto residual = system.stiffness_full() * u_full;
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= load_full[i];

  ConormalTrace out;
  if (grid.dim() == 1) {
    out.nodes = {grid.node(0), grid.node(grid.n())};
    for (auto v : out.nodes) out.g.push_back(residual[v]);
    out.integral = out.g[0] + out.g[1];
    return out;
  }
  out.nodes = boundary_loop(grid);
  const std::size_t m = out.nodes.size();
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = residual[out.nodes[i]];
  // Cyclic P1 mass matrix of the boundary loop: h/6 * [.. 1 4 1 ..].
  const double h = grid.h();
  std::vector<std::size_t> r, c;
  std::vector<double> v;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t next = (i + 1) % m;
    const std::size_t prev = (i + m - 1) % m;
    r.insert(r.end(), {i, i, i});
    c.insert(c.end(), {prev, i, next});
    v.insert(v.end(), {h / 6.0, 4.0 * h / 6.0, h / 6.0});
  }
  const auto mass = SparseSymMatrix::from_triplets(m, r, c, v);
  SolveOptions opts;
  opts.tol = 1e-12;
  out.g = factor_solve(mass, rhs, opts).x;
  for (double x : rhs) out.integral += x;
  return out;
}

FluxRecord boundary_flux(const DomainSystem& system, const std::vector<double>& u_full, double lambda, int k) {
  const auto& grid = system.grid();
  const auto& op = system.op();
  std::vector<double> load = system.mass_full() * u_full;
  for (auto& x : load) x *= lambda;
  const auto trace = recover_conormal(system, u_full, load);

  FluxRecord rec;
  rec.eps = op.eps();
  rec.k = k;
  rec.lambda = lambda;
  if (grid.dim() == 1) {
    for (std::size_t s = 0; s < 2; ++s) {
      const auto& facet = grid.boundary_facets()[s];
      const Point x = grid.node_coordinates(facet.nodes[0]);
      const double an = normal_stiffness(op.coefficient_at(x), facet.normal, 1);
      const double dn = trace.g[s] / an;
      rec.flux += dn * dn;
      const auto ge = element_gradient(grid, u_full, facet.element, Point{s == 0 ? 0.0 : 1.0, 0.0});
      rec.flux_raw += ge[0] * ge[0];
    }
  } else {
    std::vector<std::int64_t> loop_index(grid.num_nodes(), -1);
    for (std::size_t i = 0; i < trace.nodes.size(); ++i) loop_index[trace.nodes[i]] = static_cast<std::int64_t>(i);
    for (const auto& facet : grid.boundary_facets()) {
      const double g0 = trace.g[static_cast<std::size_t>(loop_index[facet.nodes[0]])];
      const double g1 = trace.g[static_cast<std::size_t>(loop_index[facet.nodes[1]])];
      for (const auto& p : facet_points(grid, facet)) {
        const double g = (1.0 - p.t) * g0 + p.t * g1;
        const double an = normal_stiffness(op.coefficient_at(p.x), facet.normal, 2);
        rec.flux += p.weight * (g / an) * (g / an);
        const auto ge = element_gradient(grid, u_full, facet.element, p.xi);
        rec.flux_raw += p.weight * (ge[0] * ge[0] + ge[1] * ge[1]);
      }
    }
  }
  rec.flux_over_lambda = lambda > 0.0 ? rec.flux / lambda : 0.0;
  rec.eps2_lambda = rec.eps * rec.eps * lambda;
  rec.regime = rec.eps2_lambda >= 1.0 ? "eps2_lambda_ge_1" : "eps2_lambda_lt_1";
  return rec;
}

double rellich_residual(const DomainSystem& system, const std::vector<double>& u_full,
                        const std::vector<double>& f_full, const Point& center) {
  const auto& grid = system.grid();
  const auto& op = system.op();
  const int d = grid.dim();
  const auto trace = recover_conormal(system, u_full, system.mass_full() * f_full);

  double lhs = 0.0;
  if (d == 1) {
    for (std::size_t s = 0; s < 2; ++s) {
      const auto& facet = grid.boundary_facets()[s];
      const Point x = grid.node_coordinates(facet.nodes[0]);
      const double an = normal_stiffness(op.coefficient_at(x), facet.normal, 1);
      lhs += (x[0] - center[0]) * facet.normal[0] * trace.g[s] * trace.g[s] / an;
    }
  } else {
    std::vector<std::int64_t> loop_index(grid.num_nodes(), -1);
    for (std::size_t i = 0; i < trace.nodes.size(); ++i) loop_index[trace.nodes[i]] = static_cast<std::int64_t>(i);
    for (const auto& facet : grid.boundary_facets()) {
      const double g0 = trace.g[static_cast<std::size_t>(loop_index[facet.nodes[0]])];
      const double g1 = trace.g[static_cast<std::size_t>(loop_index[facet.nodes[1]])];
      for (const auto& p : facet_points(grid, facet)) {
        const double g = (1.0 - p.t) * g0 + p.t * g1;
        const double hn = (p.x[0] - center[0]) * facet.normal[0] + (p.x[1] - center[1]) * facet.normal[1];
        lhs += p.weight * hn * g * g / normal_stiffness(op.coefficient_at(p.x), facet.normal, 2);
      }
    }
  }

  const auto quad = Quadrature::gauss2(d);
  const double volume = std::pow(grid.h(), d);
  double interior = 0.0;
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto o = grid.element_origin(e);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const auto& xi = quad.points[q];
      const Point x{(o[0] + xi[0]) * grid.h(), d == 2 ? (o[1] + xi[1]) * grid.h() : 0.0};
      const Point hx{x[0] - center[0], d == 2 ? x[1] - center[1] : 0.0};
      const auto gu = element_gradient(grid, u_full, e, xi);
      const double fq = element_value(grid, f_full, e, xi);
      const Mat2 a = op.coefficient_at(x);
      const auto da = op.coefficient_gradient_at(x);
      double agg = 0.0, dagg = 0.0, hgu = 0.0;
      for (int i = 0; i < d; ++i) {
        hgu += hx[i] * gu[i];
        for (int j = 0; j < d; ++j) {
          agg += a(i, j) * gu[i] * gu[j];
          double hda = 0.0;
          for (int k = 0; k < d; ++k) hda += hx[k] * da[k](i, j);
          dagg += hda * gu[i] * gu[j];
        }
      }
      interior += quad.weights[q] * volume * ((d - 2) * agg + dagg + 2.0 * hgu * fq);
    }
  }
  const double rhs = -interior;
  const double denom = std::abs(lhs) + std::abs(rhs);
  return denom > 0.0 ? std::abs(lhs - rhs) / denom : 0.0;
}

double boundary_layer_energy(const DomainGrid& grid, const std::vector<double>& u_full, double eps, double c_layer) {
  const double width = c_layer * eps;
  if (!(eps > 0.0) || !(c_layer > 0.0) || width >= 0.5) {
    throw InvalidArgument("boundary_layer_energy: need 0 < c_layer * eps < 0.5");
  }
  if (width < grid.h()) throw InvalidArgument("boundary_layer_energy: layer narrower than one mesh cell (empty layer)");
  const int d = grid.dim();
  const auto quad = Quadrature::gauss2(d);
  const double volume = std::pow(grid.h(), d);
  double energy = 0.0;
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto c = grid.element_centroid(e);
    double dist = std::min(c[0], 1.0 - c[0]);
    if (d == 2) dist = std::min({dist, c[1], 1.0 - c[1]});
    if (dist >= width) continue;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const auto g = element_gradient(grid, u_full, e, quad.points[q]);
      energy += quad.weights[q] * volume * (g[0] * g[0] + g[1] * g[1]);
    }
  }
  return energy / eps;
}

}  // namespace homolab
