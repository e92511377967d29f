// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include "hbf/array_model.hpp"
#include "hbf/numerics.hpp"

namespace hbf {

/// Unknowns x = (sin(theta), Re beta, Im beta) plus the known powers that
/// scale the Fisher information. sigma_s is the pilot amplitude, i.e.
/// S^H S = sigma_s^2 I.
struct ChannelState {
  double theta = 0.0;
  std::complex<double> beta{1.0, 0.0};
  double sigma_n = 1.0;
  double sigma_s = 1.0;
  UlaGeometry geom{1};

  /// Throws kInvalidArgument on non-positive powers or beta = 0.
  void validate() const;
};

/// Real symmetric 3x3 Fisher information over (sin(theta), Re beta, Im beta).
struct FisherMatrix {
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();

  double operator()(int r, int c) const { return j(r, c); }
};

/// Closed-form Slepian-Bangs FIM of y = beta S F^T a(theta) + n.
/// Throws kDimensionMismatch when F.rows() != n_tx.
FisherMatrix fim(const ComplexMatrix& f, const ChannelState& state);

/// C = J^{-1}. Throws kSingularFim when min eig < 1e-12 * max eig.
Eigen::Matrix3d crb(const FisherMatrix& fisher);

/// Closed-form angle error bound sqrt([J^{-1}]_11). The bound is expressed
/// with respect to sin(theta), the first unknown of the FIM.
/// Throws kDegenerateBound when F carries no angle information.
double aeb(const ComplexMatrix& f, const ChannelState& state);

/// Schur-complement pieces of the closed form: numerator a^H F* F^T a and
/// denominator of the square-root argument (see aeb()).
struct AebTerms {
  double numerator = 0.0;
  double denominator = 0.0;
};
AebTerms aeb_terms(const ComplexMatrix& f, const ChannelState& state);

}  // namespace hbf
