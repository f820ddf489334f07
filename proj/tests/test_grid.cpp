// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "homolab/error.hpp"
#include "homolab/grid.hpp"

using namespace homolab;

TEST(Quadrature, WeightsSumToOneAndExactForCubics) {
  for (int d : {1, 2}) {
    const auto q = Quadrature::gauss2(d);
    EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 1.0, 1e-15);
  }
  const auto q = Quadrature::gauss2(2);
  double integral = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& x = q.points[i];
    integral += q.weights[i] * std::pow(x[0], 3) * std::pow(x[1], 2);
  }
  EXPECT_NEAR(integral, 1.0 / 12.0, 1e-15);
}

TEST(ShapeFunctions, PartitionOfUnity) {
  const auto s = shape_functions(2, {0.3, 0.8});
  double sum = 0.0, gx = 0.0, gy = 0.0;
  for (int a = 0; a < 4; ++a) {
    sum += s.value[a];
    gx += s.grad[a][0];
    gy += s.grad[a][1];
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(gx, 0.0, 1e-15);
  EXPECT_NEAR(gy, 0.0, 1e-15);
}

TEST(TorusGrid, DofsWrapAndElementsAreDistinct) {
  const TorusGrid g(2, 4);
  EXPECT_EQ(g.num_dofs(), 16u);
  EXPECT_EQ(g.dof(4, 0), g.dof(0, 0));
  EXPECT_EQ(g.dof(-1, 5), g.dof(3, 1));
  for (std::size_t e = 0; e < g.num_elements(); ++e) {
    const auto d = g.element_dofs(e);
    EXPECT_EQ(std::set<std::size_t>(d.begin(), d.end()).size(), 4u);
  }
  EXPECT_THROW(TorusGrid(2, 1), InvalidArgument);
}

TEST(DomainGrid, InteriorBoundaryAndNormals) {
  const DomainGrid g(2, 5);
  EXPECT_EQ(g.num_nodes(), 36u);
  EXPECT_EQ(g.num_interior(), 16u);
  for (auto v : g.boundary_nodes()) {
    const auto x = g.node_coordinates(v);
    EXPECT_TRUE(x[0] == 0.0 || x[0] == 1.0 || x[1] == 0.0 || std::abs(x[1] - 1.0) < 1e-15);
  }
  ASSERT_EQ(g.boundary_facets().size(), 20u);
  for (const auto& f : g.boundary_facets()) {
    EXPECT_DOUBLE_EQ(std::hypot(f.normal[0], f.normal[1]), 1.0);
    for (auto v : f.nodes) EXPECT_TRUE(g.is_boundary(v));
    // Facet belongs to its element.
    const auto en = g.element_nodes(f.element);
    for (auto v : f.nodes) EXPECT_NE(std::find(en.begin(), en.end(), v), en.end());
  }
}

TEST(DomainGrid, ExpandRestrictRoundTrip) {
  const DomainGrid g(2, 4);
  std::vector<double> interior(g.num_interior());
  std::iota(interior.begin(), interior.end(), 1.0);
  const auto full = g.expand(interior);
  for (auto v : g.boundary_nodes()) EXPECT_EQ(full[v], 0.0);
  EXPECT_EQ(g.restrict_to_interior(full), interior);
}

TEST(DomainGrid, OneDimensional) {
  const DomainGrid g(1, 8);
  EXPECT_EQ(g.num_nodes(), 9u);
  EXPECT_EQ(g.num_interior(), 7u);
  ASSERT_EQ(g.boundary_facets().size(), 2u);
  EXPECT_EQ(g.boundary_facets()[0].normal[0], -1.0);
  EXPECT_EQ(g.boundary_facets()[1].normal[0], 1.0);
}
