// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hbf/numerics.hpp"

namespace hbf {

/// Phase-shifter resolution: B bits or unquantized.
class QuantizerSpec {
 public:
  static QuantizerSpec finite(int bits);
  static QuantizerSpec infinite() { return QuantizerSpec(std::nullopt); }

  bool is_infinite() const noexcept { return !bits_; }
  int bits() const;  // throws on infinite
  /// Number of phase levels 2^B; 0 for infinite.
  std::int64_t levels() const noexcept;
  std::string label() const;  // "5" or "inf"

  /// Nearest available phase on the circle, in [0, 2pi). Exact midpoints go
  /// to the smaller index. Infinite resolution returns the input unchanged.
  double quantize(double phase) const;

  friend bool operator==(const QuantizerSpec&, const QuantizerSpec&) = default;

 private:
  explicit QuantizerSpec(std::optional<int> bits) : bits_(bits) {}
  std::optional<int> bits_;
};

RealMatrix quantize_phases(const RealMatrix& phases, const QuantizerSpec& spec);

/// (1/sqrt(n_tx)) exp(j Q(angle(Z))) elementwise.
ComplexMatrix project_to_feasible(const ComplexMatrix& z, const QuantizerSpec& spec);

/// Uniform i.i.d. draw from the feasible set of an n_tx x n_rf RF precoder.
ComplexMatrix random_feasible_rf(int n_tx, int n_rf, const QuantizerSpec& spec,
                                 std::mt19937_64& rng);

struct HybridFactors {
  ComplexMatrix f_rf;  // n_tx x n_rf
  ComplexMatrix f_bb;  // n_rf x M
};

/// Power-normalized least-squares BB precoder for a fixed RF precoder.
/// Throws kSingularGram for rank-deficient f_rf and kZeroBb when f_opt has
/// no component in the span of f_rf.
ComplexMatrix bb_update(const ComplexMatrix& f_rf, const ComplexMatrix& f_opt, double total_power);

/// max{sqrt(2) ||F_BB F_BB^H||_F, ||F_BB||_F^2}. Throws kZeroBb.
double rho_rule(const ComplexMatrix& f_bb);

double augmented_lagrangian(const ComplexMatrix& f_tilde, const ComplexMatrix& f_rf,
                            const ComplexMatrix& u, double rho, const ComplexMatrix& f_opt,
                            const ComplexMatrix& f_bb);

/// ||F_opt - F_RF F_BB||_F / ||F_opt||_F.
double decomposition_error(const ComplexMatrix& f_opt, const HybridFactors& factors);

struct AdmmState {
  ComplexMatrix f_rf;
  ComplexMatrix f_tilde;
  ComplexMatrix u;
  double rho = 0.0;
  int k = 0;
  std::vector<double> lagrangian_trace;  // value after each step
};

/// Quantities that stay fixed over one inner loop: F_opt F_BB^H and
/// (F_BB F_BB^H + rho I)^{-1} are formed once and reused by every step.
class AdmmOperator {
 public:
  AdmmOperator(const ComplexMatrix& f_opt, const ComplexMatrix& f_bb, double rho,
               const QuantizerSpec& spec);

  /// One pass of the F_RF projection, F~ least-squares update and scaled
  /// dual ascent; appends the new Lagrangian value to the trace.
  void step(AdmmState& state) const;

  double rho() const noexcept { return rho_; }

 private:
  ComplexMatrix f_opt_;
  ComplexMatrix f_bb_;
  double rho_;
  QuantizerSpec spec_;
  ComplexMatrix target_;       // F_opt F_BB^H
  ComplexMatrix inverse_gram_; // (F_BB F_BB^H + rho I)^{-1}
};

/// Convenience single step that builds the operator from state.rho.
AdmmState admm_step(AdmmState state, const ComplexMatrix& f_opt, const ComplexMatrix& f_bb,
                    const QuantizerSpec& spec);

struct DecompositionConfig {
  int i_max = 10;
  int k_max = 50;
  std::uint64_t seed = 1;
  int max_redraws = 10;
  bool record_inner = true;
};

struct InnerRecord {
  int outer = 0;
  int inner = 0;
  double lagrangian = 0.0;
  double decp_err = 0.0;  // with the quantized F_RF of this step
  double rho = 0.0;
};

struct OuterRecord {
  int outer = 0;
  double rho = 0.0;
  double decp_err = 0.0;  // F_RF^(i) paired with its least-squares F_BB^(i+1)
  double cost = 0.0;      // ||F_opt - F_RF^(i) F_BB^(i+1)||_F
  std::vector<double> lagrangian_trace;
};

struct Diagnostics {
  std::vector<OuterRecord> outer;
  std::vector<InnerRecord> inner;
  int redraws = 0;
  int selected_outer = 0;     // outer index whose pair was returned
  bool stopped_singular = false;
  // Error of the last RF precoder F_RF^(I) paired with F_BB^(I), the BB
  // factor that was fitted to the previous RF precoder.
  double stale_pair_decp_err = 0.0;
  double final_decp_err = 0.0;
};

struct DecompositionResult {
  HybridFactors factors;
  Diagnostics diagnostics;
};

/// Alternating least squares for F_BB and ADMM for F_RF. Returns the RF
/// precoder with its least-squares BB factor at the outer iteration of lowest
/// decomposition error (see Diagnostics for the per-iteration sequence).
DecompositionResult alt_opt_ls_admm(const ComplexMatrix& f_opt, int n_rf, double total_power,
                                    const QuantizerSpec& spec,
                                    const DecompositionConfig& config = {});

std::string diagnostics_to_json(const Diagnostics& diagnostics, int indent = 2);

}  // namespace hbf
