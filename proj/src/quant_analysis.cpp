// SPDX-License-Identifier: Apache-2.0
#include "hbf/quant_analysis.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "hbf/errors.hpp"

namespace hbf {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

double quant_bound_factor(const QuantizerSpec& spec) {
  if (spec.is_infinite()) return 0.0;
  const double half_step = std::numbers::pi / static_cast<double>(spec.levels());
  return std::abs(1.0 - std::polar(1.0, half_step));
}

std::string QuantBoundReport::csv_header() { return "B,factor,C,true_error,decp_ub"; }

std::string QuantBoundReport::csv_row() const {
  return bits + "," + format_double(factor) + "," + format_double(c) + "," +
         format_double(true_error) + "," + format_double(decp_ub);
}

QuantBoundReport verify_quantization_bound(const ComplexMatrix& f_opt,
                                           const ComplexMatrix& f_rf_star,
                                           const ComplexMatrix& f_bb, const QuantizerSpec& spec) {
  if (f_rf_star.rows() != f_opt.rows() || f_rf_star.cols() != f_bb.rows() ||
      f_bb.cols() != f_opt.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "inconsistent precoder shapes");
  }
  const ComplexMatrix quantized = f_rf_star.unaryExpr([&spec](const cdouble& v) {
    return std::polar(std::abs(v), spec.quantize(std::arg(v)));
  });

  QuantBoundReport r;
  r.bits = spec.label();
  r.factor = quant_bound_factor(spec);
  r.c = std::sqrt(static_cast<double>(f_rf_star.rows() * f_rf_star.cols())) * f_rf_star.norm() *
        f_bb.norm();
  r.true_error = (f_opt - f_rf_star * f_bb).norm();
  r.quantized_error = (f_opt - quantized * f_bb).norm();
  r.decp_ub = r.true_error + r.c * r.factor;

  const double slack = 1e-12 * (r.true_error + r.c + 1.0);
  if (r.quantized_error - r.true_error > r.c * r.factor + slack) {
    throw Error(ErrorCode::kBoundViolation,
                "quantization increased the error by " +
                    format_double(r.quantized_error - r.true_error) + " > bound " +
                    format_double(r.c * r.factor));
  }
  return r;
}

}  // namespace hbf
