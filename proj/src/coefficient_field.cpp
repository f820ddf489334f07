// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/coefficient_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "homolab/error.hpp"

namespace homolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double y) { return y - std::floor(y); }

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("coefficient field dimension must be 1 or 2");
}

double scalar_kappa(double lo, double hi) {
  if (lo <= 0.0) return lo;
  return std::min(lo, 1.0 / hi);
}

}  // namespace

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::constant: return "constant";
    case FieldKind::laminate_sine: return "laminate_sine";
    case FieldKind::product_sine: return "product_sine";
    case FieldKind::custom: return "custom";
  }
  return "unknown";
}

std::pair<double, double> eigenvalue_range(const Mat2& a, int dim) {
  if (dim == 1) return {a(0, 0), a(0, 0)};
  const double off = 0.5 * (a(0, 1) + a(1, 0));
  const double mean = 0.5 * (a(0, 0) + a(1, 1));
  const double half = 0.5 * (a(0, 0) - a(1, 1));
  const double rad = std::hypot(half, off);
  return {mean - rad, mean + rad};
}

CoefficientField CoefficientField::constant(int dim, double c) {
  return constant_tensor(dim, Mat2::scalar(dim, c));
}

CoefficientField CoefficientField::constant_tensor(int dim, const Mat2& a) {
  check_dim(dim);
  CoefficientField f;
  f.dim_ = dim;
  f.kind_ = FieldKind::constant;
  f.name_ = "constant";
  if (dim == 1) {
    f.params_ = {a(0, 0)};
  } else {
    f.params_ = {a(0, 0), a(0, 1), a(1, 0), a(1, 1)};
  }
  f.isotropic_ = dim == 1 || (a(0, 1) == 0.0 && a(1, 0) == 0.0 && a(0, 0) == a(1, 1));
  const auto [lo, hi] = eigenvalue_range(a, dim);
  f.kappa_ = scalar_kappa(lo, hi);
  return f;
}

CoefficientField CoefficientField::laminate_sine(int dim, double mu, double r) {
  check_dim(dim);
  CoefficientField f;
  f.dim_ = dim;
  f.kind_ = FieldKind::laminate_sine;
  f.name_ = "laminate_sine";
  f.params_ = {mu, r};
  f.kappa_ = scalar_kappa(mu * (1.0 - std::abs(r)), mu * (1.0 + std::abs(r)));
  return f;
}

CoefficientField CoefficientField::product_sine(double mu, double r) {
  CoefficientField f;
  f.dim_ = 2;
  f.kind_ = FieldKind::product_sine;
  f.name_ = "product_sine";
  f.params_ = {mu, r};
  f.kappa_ = scalar_kappa(mu * (1.0 - std::abs(r)), mu * (1.0 + std::abs(r)));
  return f;
}

CoefficientField CoefficientField::reciprocal_sine(int dim, double mu, double base, double r) {
  check_dim(dim);
  if (base - std::abs(r) <= 0.0) throw InvalidArgument("reciprocal_sine needs base > |r|");
  const int d = dim;
  auto a = [=](const Point& y) { return Mat2::scalar(d, mu / (base + r * std::sin(kTwoPi * y[0]))); };
  auto grad = [=](const Point& y) {
    const double den = base + r * std::sin(kTwoPi * y[0]);
    std::array<Mat2, 2> g{};
    g[0] = Mat2::scalar(d, -mu * r * kTwoPi * std::cos(kTwoPi * y[0]) / (den * den));
    return g;
  };
  InversePrimitive inv;
  if (dim == 1) {
    inv = [=](double y) { return (base * y + r * (1.0 - std::cos(kTwoPi * y)) / kTwoPi) / mu; };
  }
  const double kappa = scalar_kappa(mu / (base + std::abs(r)), mu / (base - std::abs(r)));
  CoefficientField f = custom(dim, "reciprocal_sine", a, kappa, grad, inv);
  f.params_ = {mu, base, r};
  f.isotropic_ = true;
  return f;
}

CoefficientField CoefficientField::custom(int dim, std::string name, Callable a, double kappa,
                                          GradientCallable gradient, InversePrimitive inverse_primitive) {
  check_dim(dim);
  if (!a) throw InvalidArgument("custom coefficient field needs a callable");
  CoefficientField f;
  f.dim_ = dim;
  f.kind_ = FieldKind::custom;
  f.name_ = std::move(name);
  f.kappa_ = kappa;
  f.custom_ = std::move(a);
  f.custom_gradient_ = std::move(gradient);
  f.inverse_primitive_ = std::move(inverse_primitive);
  f.isotropic_ = false;
  return f;
}

CoefficientField CoefficientField::with_kappa(double kappa) const {
  CoefficientField f = *this;
  f.kappa_ = kappa;
  return f;
}

bool CoefficientField::is_isotropic() const noexcept {
  return kind_ == FieldKind::laminate_sine || kind_ == FieldKind::product_sine || isotropic_;
}

Mat2 CoefficientField::evaluate(const Point& y_in) const {
  Point y{wrap(y_in[0]), dim_ > 1 ? wrap(y_in[1]) : 0.0};
  switch (kind_) {
    case FieldKind::constant: {
      if (dim_ == 1) return Mat2::scalar(1, params_[0]);
      Mat2 m;
      m.v = {params_[0], params_[1], params_[2], params_[3]};
      return m;
    }
    case FieldKind::laminate_sine:
      return Mat2::scalar(dim_, params_[0] * (1.0 + params_[1] * std::sin(kTwoPi * y[0])));
    case FieldKind::product_sine:
      return Mat2::scalar(2, params_[0] * (1.0 + params_[1] * std::sin(kTwoPi * y[0]) * std::sin(kTwoPi * y[1])));
    case FieldKind::custom:
      return custom_(y);
  }
  return {};
}

std::array<Mat2, 2> CoefficientField::gradient(const Point& y_in) const {
  Point y{wrap(y_in[0]), dim_ > 1 ? wrap(y_in[1]) : 0.0};
  std::array<Mat2, 2> g{};
  switch (kind_) {
    case FieldKind::constant:
      return g;
    case FieldKind::laminate_sine:
      g[0] = Mat2::scalar(dim_, params_[0] * params_[1] * kTwoPi * std::cos(kTwoPi * y[0]));
      return g;
    case FieldKind::product_sine: {
      const double s0 = std::sin(kTwoPi * y[0]), c0 = std::cos(kTwoPi * y[0]);
      const double s1 = std::sin(kTwoPi * y[1]), c1 = std::cos(kTwoPi * y[1]);
      g[0] = Mat2::scalar(2, params_[0] * params_[1] * kTwoPi * c0 * s1);
      g[1] = Mat2::scalar(2, params_[0] * params_[1] * kTwoPi * s0 * c1);
      return g;
    }
    case FieldKind::custom: {
      if (custom_gradient_) return custom_gradient_(y);
      constexpr double step = 1e-6;
      for (int k = 0; k < dim_; ++k) {
        Point yp = y, ym = y;
        yp[k] += step;
        ym[k] -= step;
        const Mat2 ap = evaluate(yp), am = evaluate(ym);
        for (int e = 0; e < 4; ++e) g[k].v[e] = (ap.v[e] - am.v[e]) / (2.0 * step);
      }
      return g;
    }
  }
  return g;
}

double CoefficientField::inverse_primitive(double y) const {
  if (kind_ == FieldKind::constant && dim_ == 1) return y / params_[0];
  if (!inverse_primitive_) throw InvalidArgument("field '" + name_ + "' has no closed-form inverse primitive");
  return inverse_primitive_(y);
}

CertificationReport certify(const CoefficientField& field, int samples_per_axis) {
  if (samples_per_axis < 2) throw InvalidArgument("certify needs samples_per_axis >= 2");
  const int dim = field.dim();
  const int s = samples_per_axis;
  const double step = 1.0 / s;
  const int ny = dim == 2 ? s : 1;

  CertificationReport rep;
  rep.samples_per_axis = s;
  rep.declared_kappa = field.kappa();
  rep.kappa_observed = std::numeric_limits<double>::infinity();

  auto sample = [&](int i, int j) {
    return Point{i * step, dim == 2 ? j * step : 0.0};
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < s; ++i) {
      const Point y = sample(i, j);
      const Mat2 a = field.evaluate(y);
      if (dim == 2) rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(a(0, 1) - a(1, 0)));
      const auto [lo, hi] = eigenvalue_range(a, dim);
      rep.kappa_observed = std::min(rep.kappa_observed, lo <= 0.0 ? lo : std::min(lo, 1.0 / hi));

      for (int k = 0; k < dim; ++k) {
        Point shifted = y;
        shifted[k] += 1.0;
        const Mat2 b = field.evaluate(shifted);
        for (int e = 0; e < 4; ++e) {
          rep.periodicity_defect = std::max(rep.periodicity_defect, std::abs(a.v[e] - b.v[e]));
        }
        // neighbour along axis k, wrapping around the cell
        const Mat2 c = field.evaluate(k == 0 ? sample((i + 1) % s, j) : sample(i, (j + 1) % s));
        double diff = 0.0;
        for (int e = 0; e < 4; ++e) diff += (c.v[e] - a.v[e]) * (c.v[e] - a.v[e]);
        rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, std::sqrt(diff) / step);
      }
    }
  }
  if (!(rep.kappa_observed > 0.0)) {
    throw InvalidArgument("coefficient field '" + field.name() + "' is not elliptic: observed kappa = " +
                          std::to_string(rep.kappa_observed));
  }
  return rep;
}

}  // namespace homolab
