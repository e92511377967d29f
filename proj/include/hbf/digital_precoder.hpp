// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "hbf/array_model.hpp"
#include "hbf/fisher_metrics.hpp"
#include "hbf/numerics.hpp"

namespace hbf {

/// Angle interval [center - half_width, center + half_width) for one UE.
struct UncertaintySet {
  double center = 0.0;
  double half_width = 5.0 * 3.14159265358979323846 / 180.0;

  /// Uniform grid of `count` points starting at the interval's lower edge
  /// with step 2 * half_width / count. Throws if any point leaves (-pi/2, pi/2).
  std::vector<double> grid(int count) const;
};

/// Directional and derivative beams, one block pair per UE:
/// [a(theta_1..G) of UE 1, a'(theta_1..G) of UE 1, a(..) of UE 2, ...].
struct Codebook {
  ComplexMatrix beams;
  std::vector<double> grid_angles;  // UE-major, ue_count * grid_per_ue entries
  int ue_count = 0;
  int grid_per_ue = 0;

  int size() const { return static_cast<int>(beams.cols()); }
  /// Squared column norms ||f_m||^2.
  RealVector column_power() const;
};

/// Throws kTooFewPilots unless m_pilots >= 2L and divisible by 2L.
Codebook build_codebook(const UlaGeometry& geom, std::span<const UncertaintySet> ues,
                        int m_pilots);

/// One design state per grid angle, carrying the nominal gain and powers.
std::vector<ChannelState> design_states(const Codebook& cb, const ChannelState& nominal);

struct PowerAllocationOptions {
  int max_iterations = 10000;
  int anneal_every = 200;
  double anneal_factor = 0.5;
  double initial_temperature = 0.1;  // relative to the uniform-allocation objective
  double step = 0.1;                 // step at t = 1 in power-fraction units, decays as 1/sqrt(t)
  double tolerance = 1e-7;
  int window = 50;
};

struct PowerAllocation {
  RealVector q;                 // linear power weight per codebook column
  double objective = 0.0;       // max over grid of the AEB at q
  double uniform_objective = 0.0;
  int iterations = 0;
  std::vector<double> stage_objectives;  // best objective at the end of each annealing stage
};

/// Equal power per beam: q_m ||f_m||^2 = P / M.
RealVector uniform_allocation(const Codebook& cb, double total_power);

/// max_g AEB(F^(pre) diag(sqrt q); x_g). Throws kDegenerateBound if any grid
/// state is unidentifiable.
double robust_objective(const Codebook& cb, std::span<const ChannelState> states,
                        const RealVector& q);

/// Minimizes the worst-case AEB over the grid states subject to
/// sum_m q_m ||f_m||^2 = P and q >= 0 using log-sum-exp smoothing of the max
/// and a projected normalized subgradient method with annealed temperature.
/// The returned objective never exceeds the uniform allocation's.
PowerAllocation optimize_power_allocation(const Codebook& cb,
                                          std::span<const ChannelState> states,
                                          double total_power,
                                          const PowerAllocationOptions& options = {});

/// F_opt = F^(pre) diag(sqrt(q_1), ..., sqrt(q_M)).
ComplexMatrix assemble_f_opt(const Codebook& cb, const RealVector& q);

}  // namespace hbf
