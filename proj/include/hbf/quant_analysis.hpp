// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "hbf/hybrid_decomposition.hpp"
#include "hbf/numerics.hpp"

namespace hbf {

/// |1 - exp(j pi / 2^B)|, the worst-case per-entry phase error of a B-bit
/// shifter mapped onto the unit circle; 0 for infinite resolution.
double quant_bound_factor(const QuantizerSpec& spec);

/// Bound on how much phase-quantizing an unquantized RF precoder F* can
/// increase the (absolute) decomposition error:
///   ||F_opt - F^ F_BB|| - ||F_opt - F* F_BB|| <= C * factor,
///   C = sqrt(N_Tx N_RF) ||F*||_F ||F_BB||_F.
struct QuantBoundReport {
  std::string bits;         // "1".."48" or "inf"
  double factor = 0.0;
  double c = 0.0;
  double true_error = 0.0;       // ||F_opt - F* F_BB||_F
  double quantized_error = 0.0;  // ||F_opt - F^ F_BB||_F
  double decp_ub = 0.0;          // true_error + C * factor

  static std::string csv_header();  // "B,factor,C,true_error,decp_ub"
  std::string csv_row() const;
};

/// Quantizes the phases of f_rf_star (moduli kept) and evaluates the bound.
/// Throws kBoundViolation if the inequality fails, which would indicate a bug.
QuantBoundReport verify_quantization_bound(const ComplexMatrix& f_opt,
                                           const ComplexMatrix& f_rf_star,
                                           const ComplexMatrix& f_bb, const QuantizerSpec& spec);

}  // namespace hbf
