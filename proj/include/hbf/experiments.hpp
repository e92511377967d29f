// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hbf/digital_precoder.hpp"
#include "hbf/fisher_metrics.hpp"
#include "hbf/hybrid_decomposition.hpp"
#include "hbf/quant_analysis.hpp"

namespace hbf {

enum class Scenario { kDecomp, kAeb, kQuantBound };

std::string to_string(Scenario s);

/// Parameters shared by every sweep. List-valued fields may only hold more
/// than one value when they are the swept variable (decomp sweeps also cross
/// the n_rf and bits lists).
struct ExperimentConfig {
  Scenario scenario = Scenario::kDecomp;
  std::string sweep = "n_rf";  // decomp: n_rf|bits, aeb: aod|n_tx|n_rf|bits, quantbound: bits

  std::vector<int> n_tx{16};
  std::vector<int> n_rf{8};
  int m_pilots = 20;
  double p_dbm = 10.0;
  std::vector<QuantizerSpec> bits{QuantizerSpec::infinite()};
  double snr_db = 10.0;
  std::vector<double> aod_deg{0.0};
  std::vector<double> ue_angles_deg;  // two or more entries select the multi-UE designs
  double codebook_center_deg = 0.0;
  double half_width_deg = 5.0;
  std::complex<double> beta{1.0, 0.0};  // nominal gain used for design and evaluation
  double d_over_lambda = 0.5;

  int trials = 50;
  std::uint64_t seed = 1;
  int i_max = 10;
  int k_max = 50;
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Throws kConfigError with a readable message.
  void validate() const;
  /// P converted from dBm to watts.
  double power_watts() const;
};

struct ResultRow {
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

/// Per-trial values behind one row, archived so every row can be recomputed.
struct TrialRecord {
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string method;
  std::string metric;
  std::vector<double> values;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<TrialRecord> trials;
  std::vector<QuantBoundReport> quant_reports;  // quant-bound scenario only
};

/// Independent stream seed for (experiment seed, stream id, trial index).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

/// I.i.d. CN(0, 1) entries scaled so that ||F||_F^2 = total_power.
ComplexMatrix random_precoder(int n_tx, int m, double total_power, std::mt19937_64& rng);

/// Channel state with sigma_s = 1 and sigma_n chosen so that
/// SNR = sigma_s^2 |beta|^2 P / sigma_n^2.
ChannelState state_for_snr(const UlaGeometry& geom, double theta, std::complex<double> beta,
                           double snr_db, double total_power);

struct DigitalDesign {
  Codebook codebook;
  PowerAllocation allocation;
  ComplexMatrix f_opt;
};

/// Codebook over the given UE intervals, robust power allocation over the
/// grid states and the assembled fully digital precoder.
DigitalDesign design_digital(const UlaGeometry& geom, std::span<const UncertaintySet> ues,
                             int m_pilots, double total_power, const ChannelState& nominal);

/// Random F_opt decomposed for every (n_rf, B) pair; mean DecpErr per pair.
ExperimentResult run_scenario1(const ExperimentConfig& cfg);
/// AEB of the designed F_opt and of its hybrid decomposition.
ExperimentResult run_scenario2(const ExperimentConfig& cfg);
/// Quantization-error bound against an unquantized decomposition.
ExperimentResult run_quant_bound(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Header sweep_name,sweep_value,method,metric,mean,std,trials,seed. Rows are
/// sorted; timing is excluded so identical configs give identical bytes.
std::string rows_to_csv(std::vector<ResultRow> rows);
std::string timing_to_csv(std::vector<ResultRow> rows);
std::string result_to_json(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Shortest round-trip decimal representation ("inf" for infinity).
std::string format_number(double v);

}  // namespace hbf
