// SPDX-License-Identifier: Apache-2.0
#include "hbf/digital_precoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "hbf/errors.hpp"

namespace hbf {

std::vector<double> UncertaintySet::grid(int count) const {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  }
  std::vector<double> out(static_cast<size_t>(count));
  const double step = 2.0 * half_width / count;
  for (int i = 0; i < count; ++i) {
    out[static_cast<size_t>(i)] = center - half_width + step * i;
  }
  for (double t : out) {
    if (!(std::abs(t) < std::numbers::pi / 2)) {
      throw Error(ErrorCode::kInvalidArgument, "grid angle outside (-90, 90) degrees");
    }
  }
  return out;
}

RealVector Codebook::column_power() const { return beams.colwise().squaredNorm().transpose(); }

Codebook build_codebook(const UlaGeometry& geom, std::span<const UncertaintySet> ues,
                        int m_pilots) {
  const int ue_count = static_cast<int>(ues.size());
  if (ue_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "codebook needs at least one UE");
  }
  if (m_pilots < 2 * ue_count || m_pilots % (2 * ue_count) != 0) {
    throw Error(ErrorCode::kTooFewPilots,
                "M = " + std::to_string(m_pilots) + " must be a positive multiple of 2L = " +
                    std::to_string(2 * ue_count));
  }
  const int g = m_pilots / (2 * ue_count);

  Codebook cb;
  cb.ue_count = ue_count;
  cb.grid_per_ue = g;
  cb.beams.resize(geom.n_tx(), m_pilots);
  int col = 0;
  for (const auto& ue : ues) {
    const auto angles = ue.grid(g);
    for (double t : angles) cb.beams.col(col++) = steering(geom, t);
    for (double t : angles) cb.beams.col(col++) = steering_deriv_theta(geom, t);
    cb.grid_angles.insert(cb.grid_angles.end(), angles.begin(), angles.end());
  }
  return cb;
}

std::vector<ChannelState> design_states(const Codebook& cb, const ChannelState& nominal) {
  std::vector<ChannelState> out;
  out.reserve(cb.grid_angles.size());
  for (double t : cb.grid_angles) {
    ChannelState s = nominal;
    s.theta = t;
    out.push_back(s);
  }
  return out;
}

RealVector uniform_allocation(const Codebook& cb, double total_power) {
  return (total_power / cb.size()) * cb.column_power().cwiseInverse();
}

ComplexMatrix assemble_f_opt(const Codebook& cb, const RealVector& q) {
  if (q.size() != cb.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "allocation length differs from codebook size");
  }
  if ((q.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "power weights must be nonnegative");
  }
  return cb.beams * q.cwiseSqrt().cast<cdouble>().asDiagonal();
}

double robust_objective(const Codebook& cb, std::span<const ChannelState> states,
                        const RealVector& q) {
  const ComplexMatrix f = assemble_f_opt(cb, q);
  double worst = 0.0;
  for (const auto& s : states) worst = std::max(worst, aeb(f, s));
  return worst;
}

namespace {

// The FIM is linear in the power fractions p (q_m = P p_m / ||f_m||^2), so
// J_g(p) = sum_m p_m J_{g,m} with J_{g,m} the FIM of beam m alone at full power.
class RobustAebModel {
 public:
  RobustAebModel(const Codebook& cb, std::span<const ChannelState> states, double total_power)
      : beams_(cb.size()) {
    const RealVector power = cb.column_power();
    per_state_.reserve(states.size());
    for (const auto& s : states) {
      std::vector<Eigen::Matrix3d> js;
      js.reserve(static_cast<size_t>(beams_));
      for (int m = 0; m < beams_; ++m) {
        const ComplexMatrix col = std::sqrt(total_power / power(m)) * cb.beams.col(m);
        js.push_back(fim(col, s).j);
      }
      per_state_.push_back(std::move(js));
    }
  }

  struct Evaluation {
    RealVector bounds;               // AEB per state
    std::vector<RealVector> grads;   // d AEB / d p per state
  };

  // Returns nullopt when some state is unidentifiable at p.
  std::optional<Evaluation> evaluate(const RealVector& p, bool with_gradient) const {
    Evaluation ev;
    ev.bounds.resize(static_cast<Eigen::Index>(per_state_.size()));
    for (size_t g = 0; g < per_state_.size(); ++g) {
      Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
      for (int m = 0; m < beams_; ++m) j += p(m) * per_state_[g][static_cast<size_t>(m)];
      const double j22 = j(1, 1);
      if (!(j22 > 0.0)) return std::nullopt;
      const double schur = j(0, 0) - (j(0, 1) * j(0, 1) + j(0, 2) * j(0, 2)) / j22;
      if (!(schur > 1e-12 * j(0, 0))) return std::nullopt;
      const double bound = 1.0 / std::sqrt(schur);
      ev.bounds(static_cast<Eigen::Index>(g)) = bound;
      if (with_gradient) {
        // c = J^{-1} e_1; d[J^{-1}]_11 / dp_m = -c^T J_m c.
        const Eigen::Vector3d c(1.0 / schur, -j(0, 1) / (j22 * schur), -j(0, 2) / (j22 * schur));
        RealVector grad(beams_);
        for (int m = 0; m < beams_; ++m) {
          const double dcrb = -c.dot(per_state_[g][static_cast<size_t>(m)] * c);
          grad(m) = dcrb / (2.0 * bound);
        }
        ev.grads.push_back(std::move(grad));
      }
    }
    return ev;
  }

 private:
  int beams_;
  std::vector<std::vector<Eigen::Matrix3d>> per_state_;
};

RealVector project_to_simplex_by_rescale(RealVector p) {
  p = p.cwiseMax(0.0);
  const double total = p.sum();
  if (total > 0.0) p /= total;
  return p;
}

}  // namespace

PowerAllocation optimize_power_allocation(const Codebook& cb,
                                          std::span<const ChannelState> states,
                                          double total_power,
                                          const PowerAllocationOptions& options) {
  if (!(total_power > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "total power must be positive");
  }
  if (states.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one design state");
  }
  for (const auto& s : states) s.validate();

  const int m = cb.size();
  const RobustAebModel model(cb, states, total_power);

  RealVector p = RealVector::Constant(m, 1.0 / m);
  auto current = model.evaluate(p, true);
  if (!current) {
    throw Error(ErrorCode::kInfeasibleGrid,
                "a grid point is unidentifiable even with uniform power");
  }

  PowerAllocation out;
  out.uniform_objective = current->bounds.maxCoeff();
  double best_objective = out.uniform_objective;
  RealVector best_p = p;
  std::vector<double> best_history{best_objective};

  double temperature = options.initial_temperature * out.uniform_objective;
  int t = 1;
  for (; t <= options.max_iterations; ++t) {
    if (t > 1 && (t - 1) % options.anneal_every == 0) {
      out.stage_objectives.push_back(best_objective);
      temperature *= options.anneal_factor;
    }

    // Log-sum-exp weights over the grid, shifted for stability.
    const RealVector& bounds = current->bounds;
    const double top = bounds.maxCoeff();
    RealVector w = ((bounds.array() - top) / temperature).exp().matrix();
    w /= w.sum();
    RealVector grad = RealVector::Zero(m);
    for (Eigen::Index g = 0; g < w.size(); ++g) grad += w(g) * current->grads[static_cast<size_t>(g)];

    // Move within the hyperplane sum p = 1 before clipping.
    RealVector dir = grad.array() - grad.mean();
    const double dir_norm = dir.norm();
    if (!(dir_norm > 0.0)) break;
    dir /= dir_norm;

    double step = options.step / std::sqrt(static_cast<double>(t));
    std::optional<RobustAebModel::Evaluation> next;
    RealVector candidate;
    for (int attempt = 0; attempt < 40 && !next; ++attempt, step *= 0.5) {
      candidate = project_to_simplex_by_rescale(p - step * dir);
      next = model.evaluate(candidate, true);
    }
    if (!next) break;
    p = std::move(candidate);
    current = std::move(next);

    const double objective = current->bounds.maxCoeff();
    if (objective < best_objective) {
      best_objective = objective;
      best_p = p;
    }
    best_history.push_back(best_objective);

    const auto n = best_history.size();
    if (t > options.anneal_every && n > static_cast<size_t>(options.window)) {
      const double past = best_history[n - 1 - static_cast<size_t>(options.window)];
      if ((past - best_objective) <= options.tolerance * best_objective) break;
    }
  }
  out.stage_objectives.push_back(best_objective);
  out.iterations = std::min(t, options.max_iterations);
  out.objective = best_objective;
  out.q = total_power * best_p.cwiseQuotient(cb.column_power());
  return out;
}

}  // namespace hbf
