// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homolab/assembly.hpp"
#include "homolab/diagnostics.hpp"
#include "homolab/eigensolver.hpp"

using namespace homolab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_abs_diff(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  EXPECT_EQ(a.row_offsets(), b.row_offsets());
  EXPECT_EQ(a.col_indices(), b.col_indices());
  double d = 0.0;
  for (std::size_t k = 0; k < a.nnz(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

}  // namespace

TEST(AssembleTorus, ConstantsSpanKernel) {
  const TorusGrid g(2, 8);
  const auto k = assemble_stiffness_torus(CoefficientField::constant(2, 1.0), g);
  const auto y = k * std::vector<double>(g.num_dofs(), 1.0);
  for (double v : y) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(AssembleTorus, ExactlySymmetric) {
  const TorusGrid g(2, 8);
  for (const auto& f : {CoefficientField::laminate_sine(2, 1.0, 0.5), CoefficientField::product_sine(1.0, 0.5)}) {
    EXPECT_EQ(assemble_stiffness_torus(f, g).asymmetry(), 0.0);
  }
}

TEST(AssembleTorus, LaminateDominatesScaledLaplacian) {
  const TorusGrid g(2, 32);
  const auto f = CoefficientField::laminate_sine(2, 1.0, 0.5);
  const auto k = assemble_stiffness_torus(f, g);
  const auto lap = assemble_stiffness_torus(CoefficientField::constant(2, 1.0), g);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    auto x = random_vector(g.num_dofs(), seed);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (auto& v : x) v -= mean;
    EXPECT_GE(k.quadratic_form(x, x), f.kappa() * lap.quadratic_form(x, x));
  }
  // Smallest nonzero generalized eigenvalue, via the shifted pencil (K + M, M).
  const auto m = assemble_mass(g);
  auto shifted = k;
  auto shifted_lap = lap;
  for (std::size_t i = 0; i < k.nnz(); ++i) {
    shifted.values()[i] += m.values()[i];
    shifted_lap.values()[i] += m.values()[i];
  }
  const auto ev = smallest_eigenpairs(shifted, m, 2);
  const auto ev_lap = smallest_eigenpairs(shifted_lap, m, 2);
  EXPECT_NEAR(ev[0].lambda, 1.0, 1e-8);
  EXPECT_GE(ev[1].lambda - 1.0, f.kappa() * (ev_lap[1].lambda - 1.0));
  EXPECT_NEAR(ev_lap[1].lambda - 1.0, 4 * kPi * kPi, 0.02 * 4 * kPi * kPi);
}

TEST(AssembleDomain, ConstantFieldIsEpsIndependentLaplacian) {
  const DomainGrid g(2, 16);
  const auto one = CoefficientField::constant(2, 1.0);
  const auto a = assemble_stiffness_domain(one, 0.25, g);
  const auto b = assemble_stiffness_domain(one, 0.01, g);
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  // Interior stencil of the bilinear Laplacian: 8/3 on the diagonal, -1/3 to all neighbours.
  const auto centre = static_cast<std::size_t>(g.interior_index(g.node(8, 8)));
  const auto east = static_cast<std::size_t>(g.interior_index(g.node(9, 8)));
  const auto diag = static_cast<std::size_t>(g.interior_index(g.node(9, 9)));
  EXPECT_NEAR(a.at(centre, centre), 8.0 / 3.0, 1e-14);
  EXPECT_NEAR(a.at(centre, east), -1.0 / 3.0, 1e-14);
  EXPECT_NEAR(a.at(centre, diag), -1.0 / 3.0, 1e-14);
}

TEST(AssembleDomain, Deterministic) {
  const DomainGrid g(2, 32);
  const auto f = CoefficientField::laminate_sine(2, 1.0, 0.5);
  EXPECT_EQ(max_abs_diff(assemble_stiffness_domain(f, 0.25, g), assemble_stiffness_domain(f, 0.25, g)), 0.0);
}

TEST(AssembleDomain, WarnsWhenUnderResolved) {
  std::vector<std::string> messages;
  auto previous = set_warning_handler([&](const std::string& m) { messages.push_back(m); });
  const DomainGrid g(2, 16);
  const auto f = CoefficientField::laminate_sine(2, 1.0, 0.5);
  (void)assemble_stiffness_domain(f, 0.5, g);  // h = eps/8: resolved
  EXPECT_TRUE(messages.empty());
  (void)assemble_stiffness_domain(f, 0.25, g);  // h = eps/4
  EXPECT_EQ(messages.size(), 1u);
  set_warning_handler(previous);
}

TEST(AssembleDomain, LaminateFirstEigenvalueSandwich) {
  const DomainGrid g(2, 128);
  const auto f = CoefficientField::laminate_sine(2, 1.0, 0.5);
  const auto k = assemble_stiffness_domain(f, 1.0 / 8.0, g);
  const auto m = restrict_to_interior(assemble_mass(g), g);
  const auto ev = smallest_eigenpairs(k, m, 1);
  EXPECT_GE(ev[0].lambda, 0.5 * 2 * kPi * kPi);
  EXPECT_LE(ev[0].lambda, 2.0 * 2 * kPi * kPi);
}

TEST(AssembleMass, EntriesSumToVolume) {
  for (int n : {4, 8, 16}) {
    EXPECT_NEAR(assemble_mass(DomainGrid(2, n)).sum_of_entries(), 1.0, 1e-13);
    EXPECT_NEAR(assemble_mass(TorusGrid(2, n)).sum_of_entries(), 1.0, 1e-13);
    EXPECT_NEAR(assemble_mass(DomainGrid(1, n)).sum_of_entries(), 1.0, 1e-13);
  }
}

TEST(CellLoad, VanishesForConstantField) {
  const TorusGrid g(2, 8);
  for (int j : {0, 1}) {
    for (double v : assemble_cell_load(CoefficientField::constant(2, 3.0), g, j)) EXPECT_NEAR(v, 0.0, 1e-14);
  }
}

TEST(CellLoad, LaminateTransverseLoadVanishes) {
  const TorusGrid g(2, 16);
  for (double v : assemble_cell_load(CoefficientField::laminate_sine(2, 1.0, 0.5), g, 1)) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(CellLoad, ProductSineIsCompatible) {
  const TorusGrid g(2, 32);
  const auto b = assemble_cell_load(CoefficientField::product_sine(1.0, 0.5), g, 0);
  double sum = 0.0;
  for (double v : b) sum += v;
  EXPECT_LE(std::abs(sum), 1e-14);
  EXPECT_GT(norm2(b), 1e-3);
}

TEST(GradientRecovery, ExactForLinearFunctions) {
  const DomainGrid g(2, 8);
  std::vector<double> u(g.num_nodes());
  for (std::size_t v = 0; v < u.size(); ++v) {
    const auto x = g.node_coordinates(v);
    u[v] = 2.0 * x[0] - 3.0 * x[1] + 1.0;
  }
  const auto grad = recover_nodal_gradient(g, u);
  for (std::size_t v = 0; v < u.size(); ++v) {
    EXPECT_NEAR(grad[0][v], 2.0, 1e-12);
    EXPECT_NEAR(grad[1][v], -3.0, 1e-12);
  }
  EXPECT_NEAR(element_value(g, u, 9, {0.5, 0.5}), 2.0 * 1.5 / 8 - 3.0 * 1.5 / 8 + 1.0, 1e-14);
}

TEST(MeshRule, ParsingAndCellCounts) {
  EXPECT_EQ(parse_mesh_rule("fixed"), MeshRule::fixed);
  EXPECT_EQ(parse_mesh_rule("eps_over_16"), MeshRule::eps_over_16);
  EXPECT_THROW(parse_mesh_rule("fine"), InvalidArgument);
  EXPECT_EQ(cells_for(MeshRule::eps_over_16, 1.0 / 8.0, 7), 128);
  EXPECT_EQ(cells_for(MeshRule::fixed, 1.0 / 8.0, 7), 7);
  EXPECT_TRUE(resolves_oscillation(1.0 / 8.0, 64));
  EXPECT_FALSE(resolves_oscillation(1.0 / 8.0, 63));
}
