// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homolab/coefficient_field.hpp"
#include "homolab/error.hpp"

using namespace homolab;

TEST(CoefficientField, ConstantIdentityEvaluatesToIdentity) {
  const auto f = CoefficientField::constant(2, 1.0);
  EXPECT_EQ(f.evaluate({0.3, 0.7}), Mat2::identity(2));
  EXPECT_EQ(f.kind(), FieldKind::constant);
}

TEST(CoefficientField, LaminateFormula) {
  const auto f = CoefficientField::laminate_sine(2, 1.0, 0.5);
  const Mat2 a = f.evaluate({0.25, 0.913});
  EXPECT_NEAR(a(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(a(1, 1), 1.5, 1e-15);
  EXPECT_EQ(a(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.kappa(), 0.5);
}

TEST(CoefficientField, ProductSineIsIdentityAtOrigin) {
  const auto f = CoefficientField::product_sine(1.0, 0.5);
  EXPECT_EQ(f.evaluate({0.0, 0.0}), Mat2::identity(2));
}

TEST(CoefficientField, EvaluateIsPeriodic) {
  const auto f = CoefficientField::product_sine(1.3, 0.4);
  for (double y1 : {0.0, 0.1234, 0.5, 0.77}) {
    for (double y2 : {0.0, 0.31, 0.99}) {
      const Mat2 base = f.evaluate({y1, y2});
      for (int s : {-3, -1, 1, 2, 7}) {
        const Mat2 a = f.evaluate({y1 + s, y2});
        const Mat2 b = f.evaluate({y1, y2 + s});
        for (int k = 0; k < 4; ++k) {
          EXPECT_NEAR(a.v[k], base.v[k], 1e-14);
          EXPECT_NEAR(b.v[k], base.v[k], 1e-14);
        }
      }
    }
  }
}

TEST(Certify, ConstantIdentity) {
  const auto rep = certify(CoefficientField::constant(2, 1.0), 16);
  EXPECT_DOUBLE_EQ(rep.kappa_observed, 1.0);
  EXPECT_EQ(rep.symmetry_defect, 0.0);
  EXPECT_EQ(rep.periodicity_defect, 0.0);
  EXPECT_EQ(rep.lipschitz_estimate, 0.0);
}

TEST(Certify, LaminateKappaIsMinimumOfModulation) {
  const auto rep = certify(CoefficientField::laminate_sine(2, 1.0, 0.5), 64);
  EXPECT_NEAR(rep.kappa_observed, 0.5, 1e-12);
  // Lipschitz constant of 1 + 0.5 sin(2 pi y) is pi, times sqrt(2) in Frobenius norm.
  EXPECT_NEAR(rep.lipschitz_estimate, std::numbers::pi * std::sqrt(2.0), 0.05);
}

TEST(Certify, RejectsNonElliptic) {
  EXPECT_THROW(certify(CoefficientField::laminate_sine(2, 1.0, 1.2), 16), InvalidArgument);
}

TEST(Certify, RejectsTooFewSamples) {
  EXPECT_THROW(certify(CoefficientField::constant(2, 1.0), 1), InvalidArgument);
}

TEST(Certify, BuiltinCatalogueProperties) {
  const CoefficientField fields[] = {
      CoefficientField::constant(2, 2.0), CoefficientField::laminate_sine(2, 1.0, 0.5),
      CoefficientField::product_sine(1.0, 0.5), CoefficientField::reciprocal_sine(2, 1.0, 2.0, 1.0)};
  for (const auto& f : fields) {
    const auto rep = certify(f, 64);
    EXPECT_EQ(rep.symmetry_defect, 0.0) << f.name();
    EXPECT_LE(rep.periodicity_defect, 1e-14) << f.name();
    EXPECT_GE(rep.kappa_observed, f.kappa() - 1e-15) << f.name();
  }
}

TEST(CoefficientField, GradientMatchesFiniteDifferences) {
  const auto f = CoefficientField::product_sine(1.0, 0.5);
  const Point y{0.17, 0.62};
  const auto g = f.gradient(y);
  const double step = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Point yp = y, ym = y;
    yp[k] += step;
    ym[k] -= step;
    const double fd = (f.evaluate(yp)(0, 0) - f.evaluate(ym)(0, 0)) / (2 * step);
    EXPECT_NEAR(g[k](0, 0), fd, 1e-7);
  }
}

TEST(CoefficientField, ReciprocalSineInversePrimitive) {
  const auto f = CoefficientField::reciprocal_sine(1, 1.0, 2.0, 1.0);
  ASSERT_TRUE(f.has_inverse_primitive());
  // int_0^1 (2 + sin 2 pi t) dt = 2.
  EXPECT_NEAR(f.inverse_primitive(1.0), 2.0, 1e-14);
  EXPECT_NEAR(f.evaluate({0.25, 0.0})(0, 0), 1.0 / 3.0, 1e-15);
}

TEST(CoefficientField, CustomAnisotropicField) {
  const auto f = CoefficientField::custom(
      2, "shear",
      [](const Point& y) {
        Mat2 a = Mat2::identity(2);
        a(0, 1) = a(1, 0) = 0.25 * std::sin(2 * std::numbers::pi * y[0]);
        return a;
      },
      0.7);
  EXPECT_FALSE(f.is_isotropic());
  const auto rep = certify(f, 32);
  EXPECT_NEAR(rep.kappa_observed, 0.75, 1e-12);
}
