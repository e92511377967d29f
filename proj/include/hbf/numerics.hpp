// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace hbf {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Gram matrices whose smallest eigenvalue falls below this fraction of the
// largest are treated as singular.
inline constexpr double kGramConditionFloor = 1e-12;
// Relative asymmetry tolerated by Hermitian-only routines.
inline constexpr double kHermitianTolerance = 1e-10;

double frobenius_norm(const ComplexMatrix& a);

// Throws kInvalidArgument when any entry is NaN or infinite.
void require_finite(const ComplexMatrix& a, std::string_view what);

// (A^H A)^{-1} A^H through a Cholesky solve of the Gram matrix.
// Throws kSingularGram for rank-deficient A.
ComplexMatrix left_pseudoinverse(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& h, double tolerance = kHermitianTolerance);

// (lambda_min, lambda_max) of a Hermitian matrix. Throws kNotHermitian.
std::pair<double, double> min_max_eigenvalues(const ComplexMatrix& h);

// Inverse of a Hermitian positive-definite matrix through LLT.
ComplexMatrix hermitian_inverse(const ComplexMatrix& h);

}  // namespace hbf
