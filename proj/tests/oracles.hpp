// SPDX-License-Identifier: Apache-2.0
// Independent reference computations for tests. Nothing here calls the
// closed forms it is used to check.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hbf/array_model.hpp"
#include "hbf/digital_precoder.hpp"
#include "hbf/fisher_metrics.hpp"
#include "hbf/numerics.hpp"

namespace oracle {

using hbf::cdouble;
using hbf::ComplexMatrix;
using hbf::ComplexVector;

inline ComplexMatrix random_complex(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ComplexMatrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = n(rng);
      const double im = n(rng);
      m(r, c) = {re, im};
    }
  return m;
}

inline hbf::ChannelState random_state(int n_tx, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hbf::ChannelState s;
  s.theta = hbf::deg_to_rad(-80.0 + 160.0 * u(rng));
  s.beta = std::polar(0.3 + 2.0 * u(rng), 2.0 * std::numbers::pi * u(rng));
  s.sigma_n = 0.2 + 2.0 * u(rng);
  s.sigma_s = 0.2 + 2.0 * u(rng);
  s.geom = hbf::UlaGeometry(n_tx, 0.25 + 0.5 * u(rng));
  return s;
}

// Noise-free pilot observation vec(beta S F^T a(u)) with S = sigma_s I and
// parameters x = (u = sin(theta), Re beta, Im beta). a(u) is built directly
// from its element phases.
inline ComplexVector observation(const ComplexMatrix& f, const hbf::ChannelState& s,
                                 const Eigen::Vector3d& x) {
  const int n = static_cast<int>(f.rows());
  const double kappa = 2.0 * std::numbers::pi * s.geom.d_over_lambda();
  ComplexVector a(n);
  for (int i = 0; i < n; ++i) a(i) = std::exp(cdouble(0.0, -kappa * i * x(0)));
  const cdouble beta(x(1), x(2));
  return s.sigma_s * beta * (f.transpose() * a);
}

// Slepian-Bangs FIM for CN(mu(x), sigma_n^2 I) with central differences.
inline Eigen::Matrix3d finite_difference_fim(const ComplexMatrix& f, const hbf::ChannelState& s,
                                             double step = 1e-6) {
  const Eigen::Vector3d x(std::sin(s.theta), s.beta.real(), s.beta.imag());
  std::vector<ComplexVector> d(3);
  for (int p = 0; p < 3; ++p) {
    Eigen::Vector3d hi = x, lo = x;
    hi(p) += step;
    lo(p) -= step;
    d[static_cast<size_t>(p)] = (observation(f, s, hi) - observation(f, s, lo)) / (2.0 * step);
  }
  Eigen::Matrix3d j;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      j(r, c) = 2.0 / (s.sigma_n * s.sigma_n) *
                d[static_cast<size_t>(r)].dot(d[static_cast<size_t>(c)]).real();
  return j;
}

// sqrt([J^{-1}]_11) via a dense inverse.
inline double inverse_route_aeb(const Eigen::Matrix3d& j) { return std::sqrt(j.inverse()(0, 0)); }

// Calls fn(p) for every point of the probability simplex in R^m whose
// coordinates are multiples of 1/divisions.
inline void for_each_simplex_point(int m, int divisions,
                                   const std::function<void(const Eigen::VectorXd&)>& fn) {
  Eigen::VectorXd p(m);
  std::function<void(int, int)> rec = [&](int idx, int remaining) {
    if (idx == m - 1) {
      p(idx) = static_cast<double>(remaining) / divisions;
      fn(p);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      p(idx) = static_cast<double>(k) / divisions;
      rec(idx + 1, remaining - k);
    }
  };
  rec(0, divisions);
}

// Grid search of the robust objective over power fractions. Each point builds
// F = F_pre diag(sqrt(q)) and takes the max over states of sqrt([J^{-1}]_11)
// with a dense inverse of hbf::fim (itself checked against finite differences).
struct BruteForceResult {
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd fractions;
};

inline BruteForceResult brute_force_allocation(const hbf::Codebook& cb,
                                               const std::vector<hbf::ChannelState>& states,
                                               double total_power, int divisions) {
  const Eigen::VectorXd power = cb.column_power();
  BruteForceResult best;
  for_each_simplex_point(cb.size(), divisions, [&](const Eigen::VectorXd& p) {
    ComplexMatrix f = cb.beams;
    for (int m = 0; m < cb.size(); ++m) f.col(m) *= std::sqrt(total_power * p(m) / power(m));
    double worst = 0.0;
    for (const auto& s : states) {
      const Eigen::Matrix3d j = hbf::fim(f, s).j;
      if (std::abs(j.determinant()) < 1e-14 * std::pow(j.norm(), 3)) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      const double c11 = j.inverse()(0, 0);
      if (!(c11 > 0.0)) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      worst = std::max(worst, std::sqrt(c11));
    }
    if (worst < best.objective) {
      best.objective = worst;
      best.fractions = p;
    }
  });
  return best;
}

}  // namespace oracle
