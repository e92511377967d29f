// SPDX-License-Identifier: Apache-2.0
#include "hbf/fisher_metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hbf/errors.hpp"

namespace hbf {

namespace {

constexpr double kIdentifiabilityFloor = 1e-12;

void check_rows(const ComplexMatrix& f, const ChannelState& state) {
  if (f.rows() != state.geom.n_tx()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "precoder has " + std::to_string(f.rows()) + " rows, array has " +
                    std::to_string(state.geom.n_tx()) + " elements");
  }
}

// g = F^T a and h = F^T D a; every FIM entry is a quadratic form in these.
struct Projections {
  ComplexVector g;
  ComplexVector h;
};

Projections project(const ComplexMatrix& f, const ChannelState& state) {
  const ComplexVector a = steering(state.geom, state.theta);
  const ComplexVector da = position_operator(state.geom).cast<cdouble>().asDiagonal() * a;
  return {f.transpose() * a, f.transpose() * da};
}

}  // namespace

void ChannelState::validate() const {
  if (!(sigma_n > 0.0) || !(sigma_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_n and sigma_s must be positive");
  }
  if (std::abs(beta) == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "channel gain beta must be nonzero");
  }
  if (!std::isfinite(theta)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must be finite");
  }
}

FisherMatrix fim(const ComplexMatrix& f, const ChannelState& state) {
  check_rows(f, state);
  state.validate();
  const auto [g, h] = project(f, state);

  const double kappa = state.geom.wavenumber_spacing();
  const double power = state.sigma_s * state.sigma_s / (state.sigma_n * state.sigma_n);
  const cdouble cross = std::conj(state.beta) * h.dot(g);  // beta^* h^H g

  FisherMatrix out;
  auto& j = out.j;
  j(0, 0) = 2.0 * power * kappa * kappa * std::norm(state.beta) * h.squaredNorm();
  j(0, 1) = 2.0 * power * kappa * (cdouble(0.0, 1.0) * cross).real();
  j(0, 2) = -2.0 * power * kappa * cross.real();
  j(1, 1) = 2.0 * power * g.squaredNorm();
  j(2, 2) = j(1, 1);
  j(1, 2) = 0.0;
  j(1, 0) = j(0, 1);
  j(2, 0) = j(0, 2);
  j(2, 1) = j(1, 2);
  return out;
}

Eigen::Matrix3d crb(const FisherMatrix& fisher) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(fisher.j, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= kIdentifiabilityFloor * hi) {
    throw Error(ErrorCode::kSingularFim, "Fisher information is not invertible");
  }
  Eigen::Matrix3d c = fisher.j.inverse();
  return 0.5 * (c + c.transpose());
}

AebTerms aeb_terms(const ComplexMatrix& f, const ChannelState& state) {
  check_rows(f, state);
  const auto [g, h] = project(f, state);
  // a^H F* F^T [a a^H D F* F^T D - D a a^H D F* F^T] a
  //   = |g|^2 |h|^2 - |h^H g|^2
  const double gg = g.squaredNorm();
  const double hh = h.squaredNorm();
  return {gg, gg * hh - std::norm(h.dot(g))};
}

double aeb(const ComplexMatrix& f, const ChannelState& state) {
  state.validate();
  check_rows(f, state);
  const auto [g, h] = project(f, state);
  const double gg = g.squaredNorm();
  const double scale = gg * h.squaredNorm();
  const AebTerms terms{gg, scale - std::norm(h.dot(g))};
  if (!(terms.numerator > 0.0) || terms.denominator <= kIdentifiabilityFloor * scale) {
    throw Error(ErrorCode::kDegenerateBound, "precoder carries no angle information");
  }
  const double prefactor = state.sigma_n / state.sigma_s /
                           (2.0 * std::numbers::sqrt2 * std::abs(state.beta) * std::numbers::pi *
                            state.geom.d_over_lambda());
  return prefactor * std::sqrt(terms.numerator / terms.denominator);
}

}  // namespace hbf
