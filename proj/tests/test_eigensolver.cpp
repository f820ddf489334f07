// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homolab/assembly.hpp"
#include "homolab/eigensolver.hpp"

using namespace homolab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Pencil {
  SparseSymMatrix k, m;
};

Pencil laplacian_pencil(int n) {
  const DomainGrid g(2, n);
  return {assemble_stiffness_domain(CoefficientField::constant(2, 1.0), 1.0, g),
          restrict_to_interior(assemble_mass(g), g)};
}

}  // namespace

TEST(Eigensolver, IdentityPencil) {
  const auto i = SparseSymMatrix::identity(16);
  const auto ev = smallest_eigenpairs(i, i, 3);
  ASSERT_EQ(ev.size(), 3u);
  for (const auto& p : ev) EXPECT_NEAR(p.lambda, 1.0, 1e-14);
}

TEST(Eigensolver, SquareLaplacianLowestFour) {
  const auto [k, m] = laplacian_pencil(64);
  const EigenOptions opt;
  const auto ev = smallest_eigenpairs(k, m, 4, opt);
  const double exact[] = {2 * kPi * kPi, 5 * kPi * kPi, 5 * kPi * kPi, 8 * kPi * kPi};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ev[i].lambda, exact[i], 0.003 * exact[i]);
    EXPECT_LE(ev[i].residual, opt.tol);
    // Rayleigh-quotient consistency.
    EXPECT_LE(std::abs(k.quadratic_form(ev[i].vector, ev[i].vector) - ev[i].lambda), 10 * opt.tol * ev[i].lambda);
  }
  // The double eigenvalue 5 pi^2 comes with an M-orthonormal basis.
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double mij = m.quadratic_form(ev[i].vector, ev[j].vector);
      EXPECT_NEAR(mij, i == j ? 1.0 : 0.0, 1e-8);
    }
  }
}

TEST(Eigensolver, PrefixProperty) {
  const auto [k, m] = laplacian_pencil(32);
  const auto few = smallest_eigenpairs(k, m, 5);
  const auto many = smallest_eigenpairs(k, m, 20);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(few[i].lambda, many[i].lambda, 1e-8 * many[i].lambda);
  for (int i = 1; i < 20; ++i) EXPECT_LE(many[i - 1].lambda, many[i].lambda);
}

TEST(Eigensolver, CoefficientSandwich) {
  const DomainGrid g(2, 64);
  const auto m = restrict_to_interior(assemble_mass(g), g);
  const auto lap = smallest_eigenpairs(assemble_stiffness_domain(CoefficientField::constant(2, 1.0), 1.0, g), m, 10);
  const auto f = CoefficientField::laminate_sine(2, 1.0, 0.5);
  const auto osc = smallest_eigenpairs(assemble_stiffness_domain(f, 0.125, g), m, 10);
  for (int i = 0; i < 10; ++i) {
    EXPECT_GE(osc[i].lambda, f.kappa() * lap[i].lambda);
    EXPECT_LE(osc[i].lambda, lap[i].lambda / f.kappa());
  }
}

TEST(Eigensolver, DeterministicForFixedSeed) {
  const auto [k, m] = laplacian_pencil(24);
  const auto a = smallest_eigenpairs(k, m, 6);
  const auto b = smallest_eigenpairs(k, m, 6);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(a[i].lambda, b[i].lambda);
    EXPECT_EQ(a[i].vector, b[i].vector);
  }
}

TEST(Eigensolver, BudgetExhaustionIsExplicit) {
  const auto [k, m] = laplacian_pencil(32);
  EigenOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-14;
  EXPECT_THROW(smallest_eigenpairs(k, m, 8, opt), EigenConvergenceError);
}

TEST(Eigensolver, RejectsTooManyPairs) {
  const auto i = SparseSymMatrix::identity(8);
  EXPECT_THROW(smallest_eigenpairs(i, i, 3), InvalidArgument);
}
