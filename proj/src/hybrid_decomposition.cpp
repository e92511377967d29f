// SPDX-License-Identifier: Apache-2.0
#include "hbf/hybrid_decomposition.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "hbf/errors.hpp"

namespace hbf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxBits = 48;
}  // namespace

QuantizerSpec QuantizerSpec::finite(int bits) {
  if (bits < 1 || bits > kMaxBits) {
    throw Error(ErrorCode::kInvalidArgument,
                "phase-shifter bits must be in [1, " + std::to_string(kMaxBits) + "]");
  }
  return QuantizerSpec(bits);
}

int QuantizerSpec::bits() const {
  if (!bits_) throw Error(ErrorCode::kInvalidArgument, "infinite-resolution quantizer has no bits");
  return *bits_;
}

std::int64_t QuantizerSpec::levels() const noexcept {
  return bits_ ? (std::int64_t{1} << *bits_) : 0;
}

std::string QuantizerSpec::label() const { return bits_ ? std::to_string(*bits_) : "inf"; }

double QuantizerSpec::quantize(double phase) const {
  if (!bits_) return phase;
  double wrapped = std::fmod(phase, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  const auto n = levels();
  const double step = kTwoPi / static_cast<double>(n);
  const double r = wrapped / step;
  auto idx = static_cast<std::int64_t>(std::floor(r));
  if (r - static_cast<double>(idx) > 0.5) ++idx;
  idx %= n;
  return step * static_cast<double>(idx);
}

RealMatrix quantize_phases(const RealMatrix& phases, const QuantizerSpec& spec) {
  return phases.unaryExpr([&spec](double p) { return spec.quantize(p); });
}

ComplexMatrix project_to_feasible(const ComplexMatrix& z, const QuantizerSpec& spec) {
  const double modulus = 1.0 / std::sqrt(static_cast<double>(z.rows()));
  return z.unaryExpr(
      [&](const cdouble& v) { return std::polar(modulus, spec.quantize(std::arg(v))); });
}

ComplexMatrix random_feasible_rf(int n_tx, int n_rf, const QuantizerSpec& spec,
                                 std::mt19937_64& rng) {
  const double modulus = 1.0 / std::sqrt(static_cast<double>(n_tx));
  ComplexMatrix out(n_tx, n_rf);
  if (spec.is_infinite()) {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = std::polar(modulus, phase(rng));
  } else {
    std::uniform_int_distribution<std::int64_t> level(0, spec.levels() - 1);
    const double step = kTwoPi / static_cast<double>(spec.levels());
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      for (Eigen::Index r = 0; r < out.rows(); ++r)
        out(r, c) = std::polar(modulus, step * static_cast<double>(level(rng)));
  }
  return out;
}

ComplexMatrix bb_update(const ComplexMatrix& f_rf, const ComplexMatrix& f_opt,
                        double total_power) {
  if (f_rf.rows() != f_opt.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "F_RF and F_opt row counts differ");
  }
  const ComplexMatrix ls = left_pseudoinverse(f_rf) * f_opt;
  const double projected = (f_rf * ls).norm();
  if (!(projected > 0.0)) {
    throw Error(ErrorCode::kZeroBb, "F_opt has no component in the span of F_RF");
  }
  return (std::sqrt(total_power) / projected) * ls;
}

double rho_rule(const ComplexMatrix& f_bb) {
  const double fro2 = f_bb.squaredNorm();
  if (!(fro2 > 0.0)) throw Error(ErrorCode::kZeroBb, "F_BB is zero");
  const double gram = (f_bb * f_bb.adjoint()).norm();
  return std::max(std::numbers::sqrt2 * gram, fro2);
}

double augmented_lagrangian(const ComplexMatrix& f_tilde, const ComplexMatrix& f_rf,
                            const ComplexMatrix& u, double rho, const ComplexMatrix& f_opt,
                            const ComplexMatrix& f_bb) {
  const double fit = (f_opt - f_tilde * f_bb).squaredNorm();
  const double penalty = (f_tilde - f_rf + u).squaredNorm() - u.squaredNorm();
  return 0.5 * fit + 0.5 * rho * penalty;
}

double decomposition_error(const ComplexMatrix& f_opt, const HybridFactors& factors) {
  const double ref = f_opt.norm();
  if (!(ref > 0.0)) throw Error(ErrorCode::kInvalidArgument, "F_opt is zero");
  return (f_opt - factors.f_rf * factors.f_bb).norm() / ref;
}

AdmmOperator::AdmmOperator(const ComplexMatrix& f_opt, const ComplexMatrix& f_bb, double rho,
                           const QuantizerSpec& spec)
    : f_opt_(f_opt), f_bb_(f_bb), rho_(rho), spec_(spec) {
  if (!(rho > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rho must be positive");
  target_ = f_opt * f_bb.adjoint();
  ComplexMatrix gram = f_bb * f_bb.adjoint();
  gram.diagonal().array() += rho;
  inverse_gram_ = hermitian_inverse(gram);
}

void AdmmOperator::step(AdmmState& state) const {
  state.f_rf = project_to_feasible(state.f_tilde + state.u, spec_);
  state.f_tilde = (target_ + rho_ * (state.f_rf - state.u)) * inverse_gram_;
  state.u += state.f_tilde - state.f_rf;
  ++state.k;
  state.lagrangian_trace.push_back(
      augmented_lagrangian(state.f_tilde, state.f_rf, state.u, rho_, f_opt_, f_bb_));
}

AdmmState admm_step(AdmmState state, const ComplexMatrix& f_opt, const ComplexMatrix& f_bb,
                    const QuantizerSpec& spec) {
  const AdmmOperator op(f_opt, f_bb, state.rho, spec);
  op.step(state);
  return state;
}

namespace {

struct Candidate {
  ComplexMatrix f_rf;
  ComplexMatrix f_bb;
  double decp_err = 0.0;
  int outer = 0;
};

}  // namespace

DecompositionResult alt_opt_ls_admm(const ComplexMatrix& f_opt_in, int n_rf, double total_power,
                                    const QuantizerSpec& spec, const DecompositionConfig& config) {
  const auto n_tx = static_cast<int>(f_opt_in.rows());
  if (n_rf < 1 || n_rf > n_tx) {
    throw Error(ErrorCode::kInvalidArgument, "n_rf must be in [1, n_tx]");
  }
  if (config.i_max < 1 || config.k_max < 1) {
    throw Error(ErrorCode::kInvalidArgument, "i_max and k_max must be >= 1");
  }
  if (!(total_power > 0.0)) throw Error(ErrorCode::kInvalidArgument, "power must be positive");
  require_finite(f_opt_in, "F_opt");
  const double f_opt_power = f_opt_in.squaredNorm();
  if (!(f_opt_power > 0.0)) throw Error(ErrorCode::kInvalidArgument, "F_opt is zero");

  ComplexMatrix f_opt = f_opt_in;
  if (std::abs(f_opt_power - total_power) > 1e-9 * total_power) {
    spdlog::warn("||F_opt||^2 = {} differs from P = {}; renormalizing", f_opt_power, total_power);
    f_opt *= std::sqrt(total_power / f_opt_power);
  }
  const double f_opt_norm = std::sqrt(total_power);

  std::mt19937_64 rng(config.seed);
  DecompositionResult result;
  Diagnostics& diag = result.diagnostics;

  ComplexMatrix f_rf;
  ComplexMatrix f_tilde_init;
  ComplexMatrix f_bb;
  for (int attempt = 0;; ++attempt) {
    f_rf = random_feasible_rf(n_tx, n_rf, spec, rng);
    f_tilde_init = random_feasible_rf(n_tx, n_rf, spec, rng);
    try {
      f_bb = bb_update(f_rf, f_opt, total_power);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularGram || attempt >= config.max_redraws) throw;
      ++diag.redraws;
    }
  }

  Candidate best;
  best.decp_err = std::numeric_limits<double>::infinity();
  auto consider = [&](int outer) {
    OuterRecord rec;
    rec.outer = outer;
    rec.cost = (f_opt - f_rf * f_bb).norm();
    rec.decp_err = rec.cost / f_opt_norm;
    rec.rho = rho_rule(f_bb);
    if (rec.decp_err < best.decp_err) best = {f_rf, f_bb, rec.decp_err, outer};
    diag.outer.push_back(std::move(rec));
  };

  for (int i = 0; i < config.i_max; ++i) {
    if (i > 0) {
      try {
        f_bb = bb_update(f_rf, f_opt, total_power);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularGram) throw;
        spdlog::debug("outer iteration {}: RF precoder lost rank, stopping", i);
        diag.stopped_singular = true;
        break;
      }
    }
    consider(i);
    OuterRecord& rec = diag.outer.back();

    AdmmState state;
    state.f_rf = f_rf;
    state.f_tilde = f_tilde_init;
    state.u = ComplexMatrix::Zero(n_tx, n_rf);
    state.rho = rec.rho;
    const AdmmOperator op(f_opt, f_bb, state.rho, spec);
    for (int k = 0; k < config.k_max; ++k) {
      op.step(state);
      if (config.record_inner) {
        diag.inner.push_back({i, state.k, state.lagrangian_trace.back(),
                              (f_opt - state.f_rf * f_bb).norm() / f_opt_norm, state.rho});
      }
    }
    rec.lagrangian_trace = std::move(state.lagrangian_trace);
    f_rf = project_to_feasible(state.f_tilde, spec);
  }

  if (!diag.stopped_singular) {
    diag.stale_pair_decp_err = (f_opt - f_rf * f_bb).norm() / f_opt_norm;
    try {
      f_bb = bb_update(f_rf, f_opt, total_power);
      consider(config.i_max);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularGram) throw;
      diag.stopped_singular = true;
    }
  } else {
    diag.stale_pair_decp_err = std::numeric_limits<double>::quiet_NaN();
  }

  diag.selected_outer = best.outer;
  diag.final_decp_err = best.decp_err;
  result.factors = {std::move(best.f_rf), std::move(best.f_bb)};
  return result;
}

std::string diagnostics_to_json(const Diagnostics& d, int indent) {
  using nlohmann::json;
  json j;
  j["redraws"] = d.redraws;
  j["selected_outer"] = d.selected_outer;
  j["stopped_singular"] = d.stopped_singular;
  j["final_decp_err"] = d.final_decp_err;
  j["stale_pair_decp_err"] =
      std::isfinite(d.stale_pair_decp_err) ? json(d.stale_pair_decp_err) : json(nullptr);
  json outer = json::array();
  for (const auto& o : d.outer) {
    outer.push_back({{"outer", o.outer},
                     {"rho", o.rho},
                     {"decp_err", o.decp_err},
                     {"cost", o.cost},
                     {"lagrangian_trace", o.lagrangian_trace}});
  }
  j["outer"] = std::move(outer);
  json inner = json::array();
  for (const auto& r : d.inner) {
    inner.push_back({{"outer", r.outer},
                     {"inner", r.inner},
                     {"lagrangian", r.lagrangian},
                     {"decp_err", r.decp_err},
                     {"rho", r.rho}});
  }
  j["iterations"] = std::move(inner);
  return j.dump(indent);
}

}  // namespace hbf
