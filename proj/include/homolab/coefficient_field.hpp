// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace homolab {

/// Point of R^d, d <= 2. Unused trailing coordinates are ignored.
using Point = std::array<double, 2>;

/// Small dense d x d matrix (d <= 2), row-major.
struct Mat2 {
  std::array<double, 4> v{};

  double& operator()(int i, int j) { return v[2 * i + j]; }
  double operator()(int i, int j) const { return v[2 * i + j]; }

  static Mat2 identity(int dim) {
    Mat2 m;
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat2 scalar(int dim, double c) {
    Mat2 m;
    for (int i = 0; i < dim; ++i) m(i, i) = c;
    return m;
  }

  friend bool operator==(const Mat2&, const Mat2&) = default;
};

enum class FieldKind { constant, laminate_sine, product_sine, custom };

std::string to_string(FieldKind kind);

/// Structural diagnostics of a coefficient field on a uniform sample grid.
struct CertificationReport {
  double kappa_observed = 0.0;
  double symmetry_defect = 0.0;
  double periodicity_defect = 0.0;
  double lipschitz_estimate = 0.0;
  double declared_kappa = 0.0;
  int samples_per_axis = 0;
};

/// A symmetric, uniformly elliptic, Z^d-periodic matrix field y -> A(y).
///
/// Builtin catalogue:
///   constant       A = C (any constant SPD matrix, c*I in the common case)
///   laminate_sine  A = mu (1 + r sin 2 pi y_1) I
///   product_sine   A = mu (1 + r sin 2 pi y_1 sin 2 pi y_2) I      (d = 2)
/// plus `custom` fields backed by a user callable. Instances are immutable
/// and may be shared between threads.
class CoefficientField {
 public:
  using Callable = std::function<Mat2(const Point&)>;
  using GradientCallable = std::function<std::array<Mat2, 2>(const Point&)>;
  /// Antiderivative y -> int_0^y dt / a(t) of a scalar 1D field. Lets the
  /// 1D discretization integrate 1/a exactly element by element.
  using InversePrimitive = std::function<double(double)>;

  static CoefficientField constant(int dim, double c);
  static CoefficientField constant_tensor(int dim, const Mat2& a);
  static CoefficientField laminate_sine(int dim, double mu, double r);
  static CoefficientField product_sine(double mu, double r);
  /// Scalar field a(y) = mu / (base + r sin 2 pi y_1); 1/a is a trigonometric
  /// polynomial, so the inverse primitive is known in closed form.
  static CoefficientField reciprocal_sine(int dim, double mu, double base, double r);
  static CoefficientField custom(int dim, std::string name, Callable a, double kappa,
                                 GradientCallable gradient = {}, InversePrimitive inverse_primitive = {});

  int dim() const noexcept { return dim_; }
  FieldKind kind() const noexcept { return kind_; }
  /// Catalogue name (the kind name for builtins, the user label for custom).
  const std::string& name() const noexcept { return name_; }
  std::span<const double> params() const noexcept { return params_; }
  /// Declared ellipticity constant: kappa |xi|^2 <= xi.A xi <= |xi|^2 / kappa.
  double kappa() const noexcept { return kappa_; }
  CoefficientField with_kappa(double kappa) const;

  /// A(y mod 1).
  Mat2 evaluate(const Point& y) const;
  /// d/dy_k A(y), k < dim. Analytic for builtins, central differences otherwise.
  std::array<Mat2, 2> gradient(const Point& y) const;
  /// True when A(y) is a multiple of the identity at every point.
  bool is_isotropic() const noexcept;
  bool has_inverse_primitive() const noexcept { return static_cast<bool>(inverse_primitive_); }
  /// int_0^y dt / a(t) for scalar 1D fields that provide it.
  double inverse_primitive(double y) const;

 private:
  CoefficientField() = default;

  int dim_ = 2;
  FieldKind kind_ = FieldKind::constant;
  std::string name_;
  std::vector<double> params_;
  double kappa_ = 1.0;
  Callable custom_;
  GradientCallable custom_gradient_;
  InversePrimitive inverse_primitive_;
  bool isotropic_ = true;
};

/// Samples A on the grid {i / samples_per_axis}^d and measures ellipticity,
/// symmetry, periodicity and a finite-difference Lipschitz constant.
/// Throws InvalidArgument for samples_per_axis < 2 or a non-elliptic field.
CertificationReport certify(const CoefficientField& field, int samples_per_axis);

/// Smallest and largest eigenvalue of the symmetric part of a (d <= 2).
std::pair<double, double> eigenvalue_range(const Mat2& a, int dim);

}  // namespace homolab
