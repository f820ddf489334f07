// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/assembly.hpp"

#include <cmath>
#include <sstream>

#include "homolab/diagnostics.hpp"
#include "homolab/error.hpp"

namespace homolab {

namespace {

struct ReferenceData {
  Quadrature quad;
  std::vector<ShapeValues> shapes;
};

ReferenceData reference_data(int dim) {
  ReferenceData r{Quadrature::gauss2(dim), {}};
  for (const auto& xi : r.quad.points) r.shapes.push_back(shape_functions(dim, xi));
  return r;
}

template <typename Grid>
SparseSymMatrix pattern_of(const Grid& grid, std::size_t dofs) {
  return SparseSymMatrix::from_elements(dofs, grid.num_elements(), grid.nodes_per_element(),
                                        [&](std::size_t e) {
                                          if constexpr (requires { grid.element_dofs(e); }) {
                                            return grid.element_dofs(e);
                                          } else {
                                            return grid.element_nodes(e);
                                          }
                                        });
}

template <typename Grid>
std::array<std::size_t, 4> nodes_of(const Grid& grid, std::size_t e) {
  if constexpr (requires { grid.element_dofs(e); }) {
    return grid.element_dofs(e);
  } else {
    return grid.element_nodes(e);
  }
}

// coeff_at(point in the unit box) -> A at that point.
template <typename Grid, typename CoeffAt>
SparseSymMatrix assemble_stiffness(const Grid& grid, std::size_t dofs, CoeffAt&& coeff_at) {
  const int dim = grid.dim();
  const int nodes = grid.nodes_per_element();
  const double h = grid.h();
  const double volume = std::pow(h, dim);
  const auto ref = reference_data(dim);
  SparseSymMatrix k = pattern_of(grid, dofs);

  double ke[4][4];
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto origin = grid.element_origin(e);
    for (int a = 0; a < nodes; ++a)
      for (int b = 0; b < nodes; ++b) ke[a][b] = 0.0;
    for (std::size_t q = 0; q < ref.quad.size(); ++q) {
      const auto& xi = ref.quad.points[q];
      const Point x{(origin[0] + xi[0]) * h, dim == 2 ? (origin[1] + xi[1]) * h : 0.0};
      const Mat2 a_q = coeff_at(x);
      const double w = ref.quad.weights[q] * volume / (h * h);
      const auto& s = ref.shapes[q];
      for (int a = 0; a < nodes; ++a) {
        double ag[2] = {0.0, 0.0};
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) ag[i] += a_q(i, j) * s.grad[a][j];
        for (int b = a; b < nodes; ++b) {
          double v = 0.0;
          for (int i = 0; i < dim; ++i) v += ag[i] * s.grad[b][i];
          ke[a][b] += w * v;
        }
      }
    }
    const auto en = nodes_of(grid, e);
    for (int a = 0; a < nodes; ++a) {
      for (int b = a; b < nodes; ++b) {
        k.add(en[a], en[b], ke[a][b]);
        if (b != a) k.add(en[b], en[a], ke[a][b]);
      }
    }
  }
  return k;
}

template <typename Grid>
SparseSymMatrix assemble_mass_impl(const Grid& grid, std::size_t dofs) {
  const int dim = grid.dim();
  const int nodes = grid.nodes_per_element();
  const double volume = std::pow(grid.h(), dim);
  const auto ref = reference_data(dim);
  double me[4][4] = {};
  for (std::size_t q = 0; q < ref.quad.size(); ++q)
    for (int a = 0; a < nodes; ++a)
      for (int b = 0; b < nodes; ++b)
        me[a][b] += ref.quad.weights[q] * volume * ref.shapes[q].value[a] * ref.shapes[q].value[b];
  SparseSymMatrix m = pattern_of(grid, dofs);
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto en = nodes_of(grid, e);
    for (int a = 0; a < nodes; ++a)
      for (int b = 0; b < nodes; ++b) m.add(en[a], en[b], me[a][b]);
  }
  return m;
}

template <typename Grid>
std::array<double, 2> gradient_in_element(const Grid& grid, const std::vector<double>& u, std::size_t e,
                                          const Point& xi) {
  const int dim = grid.dim();
  const auto s = shape_functions(dim, xi);
  const auto en = nodes_of(grid, e);
  std::array<double, 2> g{0.0, 0.0};
  for (int a = 0; a < grid.nodes_per_element(); ++a)
    for (int k = 0; k < dim; ++k) g[k] += u[en[a]] * s.grad[a][k];
  for (auto& c : g) c /= grid.h();
  return g;
}

template <typename Grid>
std::array<std::vector<double>, 2> nodal_gradient(const Grid& grid, const std::vector<double>& u, std::size_t dofs) {
  if (u.size() != dofs) throw InvalidArgument("recover_nodal_gradient: size mismatch");
  const int dim = grid.dim();
  std::array<std::vector<double>, 2> g{std::vector<double>(dofs, 0.0), std::vector<double>(dim == 2 ? dofs : 0, 0.0)};
  std::vector<int> count(dofs, 0);
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto en = nodes_of(grid, e);
    for (int a = 0; a < grid.nodes_per_element(); ++a) {
      const Point xi{static_cast<double>(a & 1), static_cast<double>((a >> 1) & 1)};
      const auto ge = gradient_in_element(grid, u, e, xi);
      for (int k = 0; k < dim; ++k) g[k][en[a]] += ge[k];
      ++count[en[a]];
    }
  }
  for (int k = 0; k < dim; ++k)
    for (std::size_t v = 0; v < dofs; ++v) g[k][v] /= count[v];
  return g;
}

}  // namespace

MeshRule parse_mesh_rule(const std::string& text) {
  if (text == "fixed") return MeshRule::fixed;
  if (text == "eps_over_16") return MeshRule::eps_over_16;
  throw InvalidArgument("unknown mesh rule '" + text + "' (expected fixed or eps_over_16)");
}

std::string to_string(MeshRule rule) { return rule == MeshRule::fixed ? "fixed" : "eps_over_16"; }

int cells_for(MeshRule rule, double eps, int fixed_n) {
  if (rule == MeshRule::fixed) return fixed_n;
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  return static_cast<int>(std::lround(std::ceil(16.0 / eps - 1e-9)));
}

bool resolves_oscillation(double eps, int n) { return 1.0 / n <= eps / 8.0 * (1.0 + 1e-12); }

SparseSymMatrix assemble_stiffness_torus(const CoefficientField& field, const TorusGrid& grid) {
  if (field.dim() != grid.dim()) throw InvalidArgument("field and grid dimensions differ");
  return assemble_stiffness(grid, grid.num_dofs(), [&](const Point& y) { return field.evaluate(y); });
}

SparseSymMatrix assemble_stiffness_domain_full(const CoefficientField& field, double eps, const DomainGrid& grid) {
  if (field.dim() != grid.dim()) throw InvalidArgument("field and grid dimensions differ");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  return assemble_stiffness(grid, grid.num_nodes(),
                            [&](const Point& x) { return field.evaluate(Point{x[0] / eps, x[1] / eps}); });
}

SparseSymMatrix assemble_stiffness_domain(const CoefficientField& field, double eps, const DomainGrid& grid) {
  if (field.kind() != FieldKind::constant && !resolves_oscillation(eps, grid.n())) {
    std::ostringstream msg;
    msg << "mesh h = 1/" << grid.n() << " does not resolve eps = " << eps << " (need h <= eps/8)";
    warn(msg.str());
  }
  return restrict_to_interior(assemble_stiffness_domain_full(field, eps, grid), grid);
}

SparseSymMatrix assemble_mass(const DomainGrid& grid) { return assemble_mass_impl(grid, grid.num_nodes()); }

SparseSymMatrix assemble_mass(const TorusGrid& grid) { return assemble_mass_impl(grid, grid.num_dofs()); }

std::vector<double> assemble_cell_load(const CoefficientField& field, const TorusGrid& grid, int j) {
  const int dim = grid.dim();
  if (j < 0 || j >= dim) throw InvalidArgument("cell load axis out of range");
  const double h = grid.h();
  const double volume = std::pow(h, dim);
  const auto ref = reference_data(dim);
  std::vector<double> load(grid.num_dofs(), 0.0);
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto origin = grid.element_origin(e);
    const auto en = grid.element_dofs(e);
    for (std::size_t q = 0; q < ref.quad.size(); ++q) {
      const auto& xi = ref.quad.points[q];
      const Mat2 a = field.evaluate(Point{(origin[0] + xi[0]) * h, dim == 2 ? (origin[1] + xi[1]) * h : 0.0});
      const double w = ref.quad.weights[q] * volume / h;
      for (int n = 0; n < grid.nodes_per_element(); ++n) {
        double v = 0.0;
        for (int i = 0; i < dim; ++i) v += ref.shapes[q].grad[n][i] * a(i, j);
        load[en[n]] -= w * v;
      }
    }
  }
  return load;
}

SparseSymMatrix restrict_to_interior(const SparseSymMatrix& full, const DomainGrid& grid) {
  std::vector<std::int64_t> keep(grid.num_nodes());
  for (std::size_t v = 0; v < grid.num_nodes(); ++v) keep[v] = grid.interior_index(v);
  return full.principal_submatrix(keep, grid.num_interior());
}

std::array<std::vector<double>, 2> recover_nodal_gradient(const DomainGrid& grid, const std::vector<double>& u) {
  return nodal_gradient(grid, u, grid.num_nodes());
}

std::array<std::vector<double>, 2> recover_nodal_gradient(const TorusGrid& grid, const std::vector<double>& u) {
  return nodal_gradient(grid, u, grid.num_dofs());
}

std::array<double, 2> element_gradient(const DomainGrid& grid, const std::vector<double>& u, std::size_t e,
                                       const Point& xi) {
  return gradient_in_element(grid, u, e, xi);
}

std::array<double, 2> element_gradient(const TorusGrid& grid, const std::vector<double>& u, std::size_t e,
                                       const Point& xi) {
  return gradient_in_element(grid, u, e, xi);
}

double element_value(const DomainGrid& grid, const std::vector<double>& u, std::size_t e, const Point& xi) {
  const auto s = shape_functions(grid.dim(), xi);
  const auto en = grid.element_nodes(e);
  double v = 0.0;
  for (int a = 0; a < grid.nodes_per_element(); ++a) v += u[en[a]] * s.value[a];
  return v;
}

}  // namespace homolab
