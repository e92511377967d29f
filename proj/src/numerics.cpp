// SPDX-License-Identifier: Apache-2.0
#include "hbf/numerics.hpp"

#include <cmath>
#include <string>

#include "hbf/errors.hpp"

namespace hbf {

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

void require_finite(const ComplexMatrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " has non-finite entries");
  }
}

ComplexMatrix left_pseudoinverse(const ComplexMatrix& a) {
  if (a.rows() < a.cols() || a.cols() == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "left pseudo-inverse needs a tall matrix, got " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  }
  const ComplexMatrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo < kGramConditionFloor * hi) {
    throw Error(ErrorCode::kSingularGram, "Gram matrix eigenvalues [" + std::to_string(lo) +
                                              ", " + std::to_string(hi) + "]");
  }
  Eigen::LLT<ComplexMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularGram, "Cholesky factorization of the Gram matrix failed");
  }
  return llt.solve(a.adjoint());
}

bool is_hermitian(const ComplexMatrix& h, double tolerance) {
  if (h.rows() != h.cols()) return false;
  const double scale = std::max(1.0, h.norm());
  return (h - h.adjoint()).norm() <= tolerance * scale;
}

std::pair<double, double> min_max_eigenvalues(const ComplexMatrix& h) {
  if (!is_hermitian(h)) {
    throw Error(ErrorCode::kNotHermitian, "matrix is not Hermitian within tolerance");
  }
  if (h.size() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "empty matrix has no eigenvalues");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

ComplexMatrix hermitian_inverse(const ComplexMatrix& h) {
  Eigen::LLT<ComplexMatrix> llt(h);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularGram, "matrix is not positive definite");
  }
  return llt.solve(ComplexMatrix::Identity(h.rows(), h.cols()));
}

}  // namespace hbf
