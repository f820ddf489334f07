// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "homolab/domain.hpp"

namespace homolab {

struct FluxRecord {
  double eps = 0.0;
  int k = 0;
  double lambda = 0.0;
  double flux = 0.0;      ///< int_{boundary} |grad u|^2 from the variational lifting
  double flux_raw = 0.0;  ///< same integral from element gradients at boundary Gauss points
  double flux_over_lambda = 0.0;
  double eps2_lambda = 0.0;
  std::string regime;  ///< "eps2_lambda_ge_1" or "eps2_lambda_lt_1"
};

/// Conormal derivative g = n.A grad u on the boundary, recovered by solving
/// int g v = a(u, v) - <load, v> over boundary test functions (a P1 boundary
/// mass system). `load_full` is M f or lambda M u as a full nodal vector.
struct ConormalTrace {
  std::vector<std::size_t> nodes;  ///< boundary nodes in loop order (d = 2) or {left, right} (d = 1)
  std::vector<double> g;           ///< conormal derivative at those nodes
  double integral = 0.0;           ///< int_{boundary} g
};

ConormalTrace recover_conormal(const DomainSystem& system, const std::vector<double>& u_full,
                               const std::vector<double>& load_full);

/// Boundary flux of a zero-trace function u solving L u = lambda u (lambda = 0
/// for a homogeneous source problem).
FluxRecord boundary_flux(const DomainSystem& system, const std::vector<double>& u_full, double lambda, int k = 0);

/// Relative defect |LHS - RHS| / (|LHS| + |RHS|) of the Rellich identity
///   int_{bdry} (h.n) (n.A grad u)^2 / (n.A n) = -int [(d-2) A grad u.grad u
///        + (h.grad_x A) grad u.grad u + 2 (h.grad u) f]
/// for h(x) = x - center, with u solving L u = f and u = 0 on the boundary.
double rellich_residual(const DomainSystem& system, const std::vector<double>& u_full,
                        const std::vector<double>& f_full, const Point& center = {0.5, 0.5});

/// (1/eps) int over elements whose centroid lies within c_layer * eps of the
/// boundary of |grad u|^2. Throws InvalidArgument when the layer holds no
/// element (c_layer * eps < h) or c_layer * eps >= 0.5.
double boundary_layer_energy(const DomainGrid& grid, const std::vector<double>& u_full, double eps, double c_layer);

}  // namespace homolab
