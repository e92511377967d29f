// SPDX-License-Identifier: Apache-2.0
#include "hbf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "hbf/errors.hpp"

namespace hbf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
const char* const kHybridMethod = "altopt-ls-admm";

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double sweep_value_of(const QuantizerSpec& spec) {
  return spec.is_infinite() ? kInf : static_cast<double>(spec.bits());
}

// Runs fn(i) for i in [0, n) on a small pool. Each index writes its own slot,
// so the result does not depend on scheduling.
void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn) {
  unsigned workers = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(n, 1)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Summary {
  double mean = kNaN;
  double std = 0.0;
  int degenerate = 0;
};

// Sample statistics over the finite entries; NaN marks a degenerate trial.
Summary summarize(const std::vector<double>& values) {
  Summary s;
  double sum = 0.0;
  int n = 0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++s.degenerate;
      continue;
    }
    sum += v;
    ++n;
  }
  if (n == 0) return s;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values)
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  s.std = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return s;
}

class Collector {
 public:
  Collector(const ExperimentConfig& cfg, ExperimentResult& out) : cfg_(cfg), out_(out) {}

  void add(const std::string& sweep_name, double sweep_value, const std::string& method,
           const std::string& metric, std::vector<double> values, double wall_ms,
           bool flag_degenerate = false) {
    const Summary s = summarize(values);
    out_.rows.push_back({sweep_name, sweep_value, method, metric, s.mean, s.std, cfg_.trials,
                         cfg_.seed, wall_ms});
    if (flag_degenerate) {
      std::vector<double> flags;
      flags.reserve(values.size());
      for (double v : values) flags.push_back(std::isnan(v) ? 1.0 : 0.0);
      add(sweep_name, sweep_value, method, metric + "_degenerate", std::move(flags), wall_ms);
    }
    out_.trials.push_back({sweep_name, sweep_value, method, metric, std::move(values)});
  }

 private:
  const ExperimentConfig& cfg_;
  ExperimentResult& out_;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

DecompositionConfig decomposition_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  DecompositionConfig d;
  d.i_max = cfg.i_max;
  d.k_max = cfg.k_max;
  d.seed = seed;
  d.record_inner = false;
  return d;
}

double aeb_or_nan(const ComplexMatrix& f, const ChannelState& state) {
  try {
    return aeb(f, state);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateBound) throw;
    return kNaN;
  }
}

void require_single(const std::string& name, std::size_t size, const std::string& sweep) {
  if (size == 0) config_error(name + " must not be empty");
  if (size > 1 && name != sweep) {
    config_error(name + " has " + std::to_string(size) + " values but the sweep variable is " +
                 sweep);
  }
}

bool valid_angle(double deg) { return std::isfinite(deg) && std::abs(deg) < 90.0; }

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kDecomp: return "decomp";
    case Scenario::kAeb: return "aeb";
    case Scenario::kQuantBound: return "quantbound";
  }
  return "unknown";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void ExperimentConfig::validate() const {
  if (trials < 1) config_error("trials must be >= 1");
  if (i_max < 1 || k_max < 1) config_error("i_max and k_max must be >= 1");
  if (m_pilots < 1) config_error("m_pilots must be >= 1");
  if (!std::isfinite(p_dbm)) config_error("p_dbm must be finite");
  if (!std::isfinite(snr_db)) config_error("snr_db must be finite");
  if (!(d_over_lambda > 0.0) || !std::isfinite(d_over_lambda)) {
    config_error("d_over_lambda must be positive");
  }
  if (!(std::abs(beta) > 0.0) || !std::isfinite(std::abs(beta))) {
    config_error("beta must be nonzero and finite");
  }
  if (!(half_width_deg > 0.0) || half_width_deg >= 90.0) {
    config_error("half_width_deg must be in (0, 90)");
  }
  if (n_tx.empty() || n_rf.empty() || bits.empty() || aod_deg.empty()) {
    config_error("n_tx, n_rf, bits and aod_deg need at least one value");
  }
  for (int n : n_tx)
    if (n < 1) config_error("n_tx values must be >= 1");
  for (int n : n_rf)
    if (n < 1) config_error("n_rf values must be >= 1");
  for (double a : aod_deg)
    if (!valid_angle(a)) config_error("aod_deg values must lie in (-90, 90)");
  for (double a : ue_angles_deg)
    if (!valid_angle(a)) config_error("ue_angles_deg values must lie in (-90, 90)");
  if (!valid_angle(codebook_center_deg)) config_error("codebook_center_deg must lie in (-90, 90)");

  const int max_rf = *std::max_element(n_rf.begin(), n_rf.end());
  const int min_tx = *std::min_element(n_tx.begin(), n_tx.end());
  if (max_rf > min_tx) config_error("n_rf must not exceed n_tx");

  switch (scenario) {
    case Scenario::kDecomp:
      if (sweep != "n_rf" && sweep != "bits") config_error("decomp sweeps over n_rf or bits");
      require_single("n_tx", n_tx.size(), sweep);
      break;
    case Scenario::kAeb: {
      const bool multi = ue_angles_deg.size() >= 2;
      if (sweep != "aod" && sweep != "n_tx" && sweep != "n_rf" && sweep != "bits") {
        config_error("aeb sweeps over aod, n_tx, n_rf or bits");
      }
      if (multi && sweep == "aod") config_error("the multi-UE mode cannot sweep aod");
      const std::string s = sweep == "aod" ? "aod_deg" : sweep;
      require_single("n_tx", n_tx.size(), s);
      require_single("n_rf", n_rf.size(), s);
      require_single("bits", bits.size(), s);
      require_single("aod_deg", aod_deg.size(), s);
      for (int n : n_tx)
        if (n < 2) config_error("aeb needs n_tx >= 2");
      const int ue_count = multi ? static_cast<int>(ue_angles_deg.size()) : 1;
      if (m_pilots % (2 * ue_count) != 0) {
        config_error("m_pilots must be a positive multiple of 2 x (number of UEs)");
      }
      break;
    }
    case Scenario::kQuantBound:
      if (sweep != "bits") config_error("quantbound sweeps over bits");
      require_single("n_tx", n_tx.size(), sweep);
      require_single("n_rf", n_rf.size(), sweep);
      break;
  }
}

double ExperimentConfig::power_watts() const { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ trial);
}

ComplexMatrix random_precoder(int n_tx, int m, double total_power, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  ComplexMatrix f(n_tx, m);
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      f(r, c) = {re, im};
    }
  f *= std::sqrt(total_power) / f.norm();
  return f;
}

ChannelState state_for_snr(const UlaGeometry& geom, double theta, std::complex<double> beta,
                           double snr_db, double total_power) {
  ChannelState s;
  s.theta = theta;
  s.beta = beta;
  s.sigma_s = 1.0;
  s.sigma_n = std::sqrt(std::norm(beta) * total_power / std::pow(10.0, snr_db / 10.0));
  s.geom = geom;
  s.validate();
  return s;
}

DigitalDesign design_digital(const UlaGeometry& geom, std::span<const UncertaintySet> ues,
                             int m_pilots, double total_power, const ChannelState& nominal) {
  DigitalDesign d;
  d.codebook = build_codebook(geom, ues, m_pilots);
  const auto states = design_states(d.codebook, nominal);
  d.allocation = optimize_power_allocation(d.codebook, states, total_power);
  d.f_opt = assemble_f_opt(d.codebook, d.allocation.q);
  return d;
}

ExperimentResult run_scenario1(const ExperimentConfig& cfg) {
  if (cfg.scenario != Scenario::kDecomp) config_error("run_scenario1 needs scenario = decomp");
  cfg.validate();
  const double power = cfg.power_watts();
  const int n_tx = cfg.n_tx.front();
  const int trials = cfg.trials;

  // The same F_opt realizations are shared by every (n_rf, B) pair.
  std::vector<ComplexMatrix> targets(static_cast<size_t>(trials));
  parallel_for(trials, cfg.threads, [&](int t) {
    std::mt19937_64 rng(trial_seed(cfg.seed, 0, static_cast<std::uint64_t>(t)));
    targets[static_cast<size_t>(t)] = random_precoder(n_tx, cfg.m_pilots, power, rng);
  });

  ExperimentResult out;
  Collector collect(cfg, out);
  for (int n_rf : cfg.n_rf) {
    for (const auto& spec : cfg.bits) {
      const auto start = std::chrono::steady_clock::now();
      std::vector<double> errs(static_cast<size_t>(trials));
      parallel_for(trials, cfg.threads, [&](int t) {
        const auto dc = decomposition_config(cfg, trial_seed(cfg.seed, 1, static_cast<std::uint64_t>(t)));
        const auto& target = targets[static_cast<size_t>(t)];
        const auto res = alt_opt_ls_admm(target, n_rf, power, spec, dc);
        errs[static_cast<size_t>(t)] = decomposition_error(target, res.factors);
      });
      const double ms = elapsed_ms(start);
      if (cfg.sweep == "n_rf") {
        collect.add("n_rf", n_rf, kHybridMethod, "decp_err_B" + spec.label(), std::move(errs), ms);
      } else {
        collect.add("bits", sweep_value_of(spec), kHybridMethod,
                    "decp_err_nrf" + std::to_string(n_rf), std::move(errs), ms);
      }
    }
  }
  return out;
}

namespace {

struct AebCase {
  int n_tx;
  int n_rf;
  QuantizerSpec spec;
  double sweep_value;
};

std::vector<AebCase> aeb_cases(const ExperimentConfig& cfg) {
  std::vector<AebCase> cases;
  const AebCase base{cfg.n_tx.front(), cfg.n_rf.front(), cfg.bits.front(), 0.0};
  if (cfg.sweep == "n_tx") {
    for (int n : cfg.n_tx) cases.push_back({n, base.n_rf, base.spec, static_cast<double>(n)});
  } else if (cfg.sweep == "n_rf") {
    for (int n : cfg.n_rf) cases.push_back({base.n_tx, n, base.spec, static_cast<double>(n)});
  } else if (cfg.sweep == "bits") {
    for (const auto& b : cfg.bits) cases.push_back({base.n_tx, base.n_rf, b, sweep_value_of(b)});
  } else {
    cases.push_back(base);
  }
  return cases;
}

std::vector<HybridFactors> decompose_trials(const ExperimentConfig& cfg, const ComplexMatrix& f_opt,
                                            int n_rf, const QuantizerSpec& spec) {
  std::vector<HybridFactors> out(static_cast<size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    const auto dc = decomposition_config(cfg, trial_seed(cfg.seed, 1, static_cast<std::uint64_t>(t)));
    out[static_cast<size_t>(t)] = alt_opt_ls_admm(f_opt, n_rf, cfg.power_watts(), spec, dc).factors;
  });
  return out;
}

std::vector<double> hybrid_aebs(const std::vector<HybridFactors>& factors,
                                const ChannelState& state) {
  std::vector<double> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(aeb_or_nan(f.f_rf * f.f_bb, state));
  return out;
}

void run_single_ue(const ExperimentConfig& cfg, Collector& collect) {
  const double power = cfg.power_watts();
  const std::string sweep_name = cfg.sweep;
  const UncertaintySet ue{deg_to_rad(cfg.codebook_center_deg), deg_to_rad(cfg.half_width_deg)};
  std::map<int, DigitalDesign> designs;

  for (const auto& c : aeb_cases(cfg)) {
    const auto start = std::chrono::steady_clock::now();
    const UlaGeometry geom(c.n_tx, cfg.d_over_lambda);
    auto it = designs.find(c.n_tx);
    if (it == designs.end()) {
      const auto nominal = state_for_snr(geom, ue.center, cfg.beta, cfg.snr_db, power);
      it = designs
               .emplace(c.n_tx, design_digital(geom, std::span(&ue, 1), cfg.m_pilots, power, nominal))
               .first;
    }
    const ComplexMatrix& f_opt = it->second.f_opt;
    const auto factors = decompose_trials(cfg, f_opt, c.n_rf, c.spec);
    const double setup_ms = elapsed_ms(start);

    const auto angles = cfg.sweep == "aod" ? cfg.aod_deg : std::vector<double>{cfg.aod_deg.front()};
    for (double aod : angles) {
      const auto eval_start = std::chrono::steady_clock::now();
      const auto state = state_for_snr(geom, deg_to_rad(aod), cfg.beta, cfg.snr_db, power);
      const double value = cfg.sweep == "aod" ? aod : c.sweep_value;
      const double digital = aeb_or_nan(f_opt, state);
      auto hybrid = hybrid_aebs(factors, state);
      const double ms = setup_ms + elapsed_ms(eval_start);
      collect.add(sweep_name, value, "digital", "aeb",
                  std::vector<double>(static_cast<size_t>(cfg.trials), digital), ms, true);
      collect.add(sweep_name, value, "hybrid", "aeb", std::move(hybrid), ms, true);
    }
  }
}

void run_multi_ue(const ExperimentConfig& cfg, Collector& collect) {
  const double power = cfg.power_watts();
  std::vector<UncertaintySet> ues;
  for (double a : cfg.ue_angles_deg) ues.push_back({deg_to_rad(a), deg_to_rad(cfg.half_width_deg)});
  const int ue_count = static_cast<int>(ues.size());

  // Designs illuminating one UE each, then all UEs with the pilots split evenly.
  struct Target {
    std::string name;
    std::vector<UncertaintySet> sets;
  };
  std::vector<Target> targets;
  for (int l = 0; l < ue_count; ++l) targets.push_back({"ue" + std::to_string(l + 1), {ues[static_cast<size_t>(l)]}});
  targets.push_back({ue_count == 2 ? "both" : "all", ues});

  for (const auto& c : aeb_cases(cfg)) {
    const UlaGeometry geom(c.n_tx, cfg.d_over_lambda);
    for (const auto& target : targets) {
      const auto start = std::chrono::steady_clock::now();
      const auto nominal = state_for_snr(geom, target.sets.front().center, cfg.beta, cfg.snr_db, power);
      const auto design = design_digital(geom, target.sets, cfg.m_pilots, power, nominal);
      const auto factors = decompose_trials(cfg, design.f_opt, c.n_rf, c.spec);
      const double ms = elapsed_ms(start);
      for (int l = 0; l < ue_count; ++l) {
        const auto state =
            state_for_snr(geom, ues[static_cast<size_t>(l)].center, cfg.beta, cfg.snr_db, power);
        const std::string metric =
            "aeb_ue" + std::to_string(l + 1) + "_design_" + target.name;
        const double digital = aeb_or_nan(design.f_opt, state);
        collect.add(cfg.sweep, c.sweep_value, "digital", metric,
                    std::vector<double>(static_cast<size_t>(cfg.trials), digital), ms, true);
        collect.add(cfg.sweep, c.sweep_value, "hybrid", metric, hybrid_aebs(factors, state), ms,
                    true);
      }
    }
  }
}

}  // namespace

ExperimentResult run_scenario2(const ExperimentConfig& cfg) {
  if (cfg.scenario != Scenario::kAeb) config_error("run_scenario2 needs scenario = aeb");
  cfg.validate();
  ExperimentResult out;
  Collector collect(cfg, out);
  if (cfg.ue_angles_deg.size() >= 2) {
    run_multi_ue(cfg, collect);
  } else {
    run_single_ue(cfg, collect);
  }
  return out;
}

ExperimentResult run_quant_bound(const ExperimentConfig& cfg) {
  if (cfg.scenario != Scenario::kQuantBound) config_error("run_quant_bound needs scenario = quantbound");
  cfg.validate();
  const double power = cfg.power_watts();
  const int n_tx = cfg.n_tx.front();
  const int n_rf = cfg.n_rf.front();
  const auto n_bits = cfg.bits.size();
  const auto start = std::chrono::steady_clock::now();

  // reports[t][b]; an unquantized decomposition per trial is shared by all B.
  std::vector<std::vector<QuantBoundReport>> reports(static_cast<size_t>(cfg.trials));
  std::vector<std::vector<double>> violated(static_cast<size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    const auto ut = static_cast<std::uint64_t>(t);
    std::mt19937_64 rng(trial_seed(cfg.seed, 0, ut));
    const ComplexMatrix f_opt = random_precoder(n_tx, cfg.m_pilots, power, rng);
    const auto star = alt_opt_ls_admm(f_opt, n_rf, power, QuantizerSpec::infinite(),
                                      decomposition_config(cfg, trial_seed(cfg.seed, 1, ut)))
                          .factors;
    auto& row = reports[static_cast<size_t>(t)];
    auto& flags = violated[static_cast<size_t>(t)];
    for (const auto& spec : cfg.bits) {
      try {
        row.push_back(verify_quantization_bound(f_opt, star.f_rf, star.f_bb, spec));
        flags.push_back(0.0);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kBoundViolation) throw;
        spdlog::error("trial {}: {}", t, e.what());
        QuantBoundReport r;
        r.bits = spec.label();
        r.factor = kNaN;
        r.c = r.true_error = r.quantized_error = r.decp_ub = kNaN;
        row.push_back(r);
        flags.push_back(1.0);
      }
    }
  });
  const double ms = elapsed_ms(start);

  ExperimentResult out;
  Collector collect(cfg, out);
  for (size_t b = 0; b < n_bits; ++b) {
    const double value = sweep_value_of(cfg.bits[b]);
    std::vector<double> factor, c, true_err, quant_err, ub, flags;
    for (int t = 0; t < cfg.trials; ++t) {
      const auto& r = reports[static_cast<size_t>(t)][b];
      factor.push_back(r.factor);
      c.push_back(r.c);
      true_err.push_back(r.true_error);
      quant_err.push_back(r.quantized_error);
      ub.push_back(r.decp_ub);
      flags.push_back(violated[static_cast<size_t>(t)][b]);
      out.quant_reports.push_back(r);
    }
    collect.add("bits", value, kHybridMethod, "factor", std::move(factor), ms);
    collect.add("bits", value, kHybridMethod, "C", std::move(c), ms);
    collect.add("bits", value, kHybridMethod, "true_error", std::move(true_err), ms);
    collect.add("bits", value, kHybridMethod, "quantized_error", std::move(quant_err), ms);
    collect.add("bits", value, kHybridMethod, "decp_ub", std::move(ub), ms);
    collect.add("bits", value, kHybridMethod, "bound_violation", std::move(flags), ms);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::kDecomp: return run_scenario1(cfg);
    case Scenario::kAeb: return run_scenario2(cfg);
    case Scenario::kQuantBound: return run_quant_bound(cfg);
  }
  config_error("unknown scenario");
}

namespace {

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.sweep_name, a.sweep_value, a.method, a.metric) <
           std::tie(b.sweep_name, b.sweep_value, b.method, b.metric);
  });
}

}  // namespace

std::string rows_to_csv(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::ostringstream os;
  os << "sweep_name,sweep_value,method,metric,mean,std,trials,seed\n";
  for (const auto& r : rows) {
    os << r.sweep_name << ',' << format_number(r.sweep_value) << ',' << r.method << ','
       << r.metric << ',' << format_number(r.mean) << ',' << format_number(r.std) << ','
       << r.trials << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string timing_to_csv(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::ostringstream os;
  os << "sweep_name,sweep_value,method,metric,wall_time_ms\n";
  for (const auto& r : rows) {
    os << r.sweep_name << ',' << format_number(r.sweep_value) << ',' << r.method << ','
       << r.metric << ',' << format_number(r.wall_time_ms) << '\n';
  }
  return os.str();
}

namespace {

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return format_number(v);
}

}  // namespace

std::string result_to_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  using nlohmann::json;
  json config;
  config["scenario"] = to_string(cfg.scenario);
  config["sweep"] = cfg.sweep;
  config["n_tx"] = cfg.n_tx;
  config["n_rf"] = cfg.n_rf;
  config["m_pilots"] = cfg.m_pilots;
  config["p_dbm"] = cfg.p_dbm;
  json bits = json::array();
  for (const auto& b : cfg.bits) bits.push_back(b.label());
  config["bits"] = std::move(bits);
  config["snr_db"] = cfg.snr_db;
  config["aod_deg"] = cfg.aod_deg;
  config["ue_angles_deg"] = cfg.ue_angles_deg;
  config["codebook_center_deg"] = cfg.codebook_center_deg;
  config["half_width_deg"] = cfg.half_width_deg;
  config["beta"] = {cfg.beta.real(), cfg.beta.imag()};
  config["d_over_lambda"] = cfg.d_over_lambda;
  config["trials"] = cfg.trials;
  config["seed"] = cfg.seed;
  config["i_max"] = cfg.i_max;
  config["k_max"] = cfg.k_max;

  auto rows = result.rows;
  sort_rows(rows);
  json jrows = json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"sweep_name", r.sweep_name},
                     {"sweep_value", number_json(r.sweep_value)},
                     {"method", r.method},
                     {"metric", r.metric},
                     {"mean", number_json(r.mean)},
                     {"std", number_json(r.std)},
                     {"trials", r.trials},
                     {"seed", r.seed}});
  }

  auto trials = result.trials;
  std::stable_sort(trials.begin(), trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.sweep_name, a.sweep_value, a.method, a.metric) <
           std::tie(b.sweep_name, b.sweep_value, b.method, b.metric);
  });
  json jtrials = json::array();
  for (const auto& t : trials) {
    json values = json::array();
    for (double v : t.values) values.push_back(number_json(v));
    jtrials.push_back({{"sweep_name", t.sweep_name},
                       {"sweep_value", number_json(t.sweep_value)},
                       {"method", t.method},
                       {"metric", t.metric},
                       {"values", std::move(values)}});
  }

  json j;
  j["config"] = std::move(config);
  j["rows"] = std::move(jrows);
  j["trials"] = std::move(jtrials);
  return j.dump(2);
}

}  // namespace hbf
