// SPDX-License-Identifier: Apache-2.0
#include "hbf/array_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hbf/errors.hpp"

namespace hbf {

UlaGeometry::UlaGeometry(int n_tx, double d_over_lambda)
    : n_tx_(n_tx), d_over_lambda_(d_over_lambda) {
  if (n_tx < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_tx must be >= 1, got " + std::to_string(n_tx));
  }
  if (!(d_over_lambda > 0.0) || !std::isfinite(d_over_lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "d_over_lambda must be positive");
  }
}

double UlaGeometry::wavenumber_spacing() const noexcept {
  return 2.0 * std::numbers::pi * d_over_lambda_;
}

RealVector position_operator(const UlaGeometry& geom) {
  return RealVector::LinSpaced(geom.n_tx(), 0.0, static_cast<double>(geom.n_tx() - 1));
}

ComplexVector steering(const UlaGeometry& geom, double theta) {
  const double phase_step = -geom.wavenumber_spacing() * std::sin(theta);
  ComplexVector a(geom.n_tx());
  for (int n = 0; n < geom.n_tx(); ++n) {
    a(n) = std::polar(1.0, phase_step * n);
  }
  return a;
}

ComplexVector steering_deriv_sin_theta(const UlaGeometry& geom, double theta) {
  const cdouble scale(0.0, -geom.wavenumber_spacing());
  return scale * (position_operator(geom).cast<cdouble>().asDiagonal() * steering(geom, theta));
}

ComplexVector steering_deriv_theta(const UlaGeometry& geom, double theta) {
  return std::cos(theta) * steering_deriv_sin_theta(geom, theta);
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace hbf
