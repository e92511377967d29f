// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hbf/numerics.hpp"

namespace hbf {

/// Uniform linear array. Angles are measured from broadside in radians and
/// element n sits at n * d_over_lambda wavelengths from the reference.
class UlaGeometry {
 public:
  explicit UlaGeometry(int n_tx, double d_over_lambda = 0.5);

  int n_tx() const noexcept { return n_tx_; }
  double d_over_lambda() const noexcept { return d_over_lambda_; }
  /// 2*pi*d/lambda, the phase progression per element per unit of sin(theta).
  double wavenumber_spacing() const noexcept;

 private:
  int n_tx_;
  double d_over_lambda_;
};

/// Diagonal of D = diag{0, 1, ..., n_tx - 1}.
RealVector position_operator(const UlaGeometry& geom);

/// a(theta), element n = exp(-j 2 pi d/lambda n sin(theta)).
ComplexVector steering(const UlaGeometry& geom, double theta);

/// d a / d theta.
ComplexVector steering_deriv_theta(const UlaGeometry& geom, double theta);

/// d a / d sin(theta) = -j (2 pi d/lambda) D a(theta).
ComplexVector steering_deriv_sin_theta(const UlaGeometry& geom, double theta);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace hbf
