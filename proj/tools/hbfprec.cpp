// SPDX-License-Identifier: Apache-2.0
// hbfprec: seeded Monte-Carlo sweeps and one-shot designs for hybrid
// analog/digital AoD-estimation precoders.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hbf/errors.hpp"
#include "hbf/experiments.hpp"

namespace fs = std::filesystem;
using hbf::Error;
using hbf::ErrorCode;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hbfprec");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HBF_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept the literal "off" for that.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

hbf::QuantizerSpec parse_bits(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return hbf::QuantizerSpec::infinite();
  try {
    std::size_t pos = 0;
    const int b = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return hbf::QuantizerSpec::finite(b);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfigError, "bits must be an integer in [1, 48] or inf, got '" + s + "'");
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kConfigError, "cannot write " + path.string());
  os << content;
  if (!os) throw Error(ErrorCode::kConfigError, "failed writing " + path.string());
}

nlohmann::json matrix_json(const hbf::ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> rr, ri;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

nlohmann::json bound_json(const hbf::ComplexMatrix& f, const hbf::ChannelState& s) {
  try {
    return hbf::aeb(f, s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateBound) throw;
    return nullptr;
  }
}

std::string run_design(const hbf::ExperimentConfig& cfg) {
  using hbf::deg_to_rad;
  const double power = cfg.power_watts();
  const hbf::UlaGeometry geom(cfg.n_tx.front(), cfg.d_over_lambda);
  std::vector<hbf::UncertaintySet> ues;
  if (cfg.ue_angles_deg.empty()) {
    ues.push_back({deg_to_rad(cfg.codebook_center_deg), deg_to_rad(cfg.half_width_deg)});
  } else {
    for (double a : cfg.ue_angles_deg) ues.push_back({deg_to_rad(a), deg_to_rad(cfg.half_width_deg)});
  }
  const auto nominal = hbf::state_for_snr(geom, ues.front().center, cfg.beta, cfg.snr_db, power);
  const auto design = hbf::design_digital(geom, ues, cfg.m_pilots, power, nominal);

  hbf::DecompositionConfig dc;
  dc.i_max = cfg.i_max;
  dc.k_max = cfg.k_max;
  dc.seed = hbf::trial_seed(cfg.seed, 1, 0);
  const auto spec = cfg.bits.front();
  const auto decomposition = hbf::alt_opt_ls_admm(design.f_opt, cfg.n_rf.front(), power, spec, dc);
  const auto& factors = decomposition.factors;
  const hbf::ComplexMatrix hybrid = factors.f_rf * factors.f_bb;

  nlohmann::json per_ue = nlohmann::json::array();
  for (const auto& ue : ues) {
    const auto s = hbf::state_for_snr(geom, ue.center, cfg.beta, cfg.snr_db, power);
    per_ue.push_back({{"theta_deg", hbf::rad_to_deg(ue.center)},
                      {"aeb_digital", bound_json(design.f_opt, s)},
                      {"aeb_hybrid", bound_json(hybrid, s)}});
  }

  std::vector<double> grid_deg;
  for (double t : design.codebook.grid_angles) grid_deg.push_back(hbf::rad_to_deg(t));
  std::vector<double> q(design.allocation.q.data(),
                        design.allocation.q.data() + design.allocation.q.size());

  nlohmann::json j;
  j["n_tx"] = cfg.n_tx.front();
  j["n_rf"] = cfg.n_rf.front();
  j["m_pilots"] = cfg.m_pilots;
  j["p_watts"] = power;
  j["bits"] = spec.label();
  j["seed"] = cfg.seed;
  j["grid_deg"] = grid_deg;
  j["q"] = q;
  j["robust_objective"] = design.allocation.objective;
  j["uniform_objective"] = design.allocation.uniform_objective;
  j["allocation_iterations"] = design.allocation.iterations;
  j["decp_err"] = hbf::decomposition_error(design.f_opt, factors);
  j["ues"] = std::move(per_ue);
  j["f_opt"] = matrix_json(design.f_opt);
  j["f_rf"] = matrix_json(factors.f_rf);
  j["f_bb"] = matrix_json(factors.f_bb);
  j["diagnostics"] = nlohmann::json::parse(hbf::diagnostics_to_json(decomposition.diagnostics, -1));
  return j.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Hybrid precoder sweeps for AoD estimation", "hbfprec"};
  app.set_config("--config", "", "key = value configuration file (flags override it)");
  app.fallthrough();
  app.require_subcommand(1);

  hbf::ExperimentConfig cfg;
  std::string out_dir = ".";
  std::optional<std::string> sweep;
  std::vector<std::string> bits_text;
  std::vector<double> aod;
  double beta_re = 1.0;
  double beta_im = 0.0;

  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--sweep", sweep, "swept variable (n_rf, n_tx, bits, aod)");
  app.add_option("--n-tx", cfg.n_tx, "transmit antennas")->capture_default_str();
  app.add_option("--n-rf", cfg.n_rf, "RF chains")->capture_default_str();
  app.add_option("--m-pilots", cfg.m_pilots, "pilot symbols M")->capture_default_str();
  app.add_option("--p-dbm", cfg.p_dbm, "total power in dBm")->capture_default_str();
  app.add_option("--bits", bits_text, "phase-shifter resolutions (integers or inf)");
  app.add_option("--snr-db", cfg.snr_db, "SNR = sigma_s^2 |beta|^2 P / sigma_n^2 in dB")
      ->capture_default_str();
  app.add_option("--aod-deg", aod, "evaluation AoDs in degrees");
  app.add_option("--ue-angles-deg", cfg.ue_angles_deg, "UE angles (two or more: multi-UE mode)");
  app.add_option("--codebook-center-deg", cfg.codebook_center_deg, "single-UE interval center")
      ->capture_default_str();
  app.add_option("--half-width-deg", cfg.half_width_deg, "uncertainty half width")
      ->capture_default_str();
  app.add_option("--beta-re", beta_re, "nominal channel gain, real part")->capture_default_str();
  app.add_option("--beta-im", beta_im, "nominal channel gain, imaginary part")
      ->capture_default_str();
  app.add_option("--d-over-lambda", cfg.d_over_lambda, "element spacing")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Monte-Carlo trials")->capture_default_str();
  app.add_option("--seed", cfg.seed, "experiment seed")->capture_default_str();
  app.add_option("--i-max", cfg.i_max, "outer iterations")->capture_default_str();
  app.add_option("--k-max", cfg.k_max, "ADMM steps per outer iteration")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)")
      ->capture_default_str();

  auto* decomp = app.add_subcommand("decomp-sweep", "decomposition error of random F_opt");
  auto* aeb = app.add_subcommand("aeb-sweep", "AEB of designed digital and hybrid precoders");
  auto* quant = app.add_subcommand("quant-bound", "quantization error bound versus B");
  auto* design = app.add_subcommand("design", "one designed F_opt and its decomposition");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& b : bits_text) cfg.bits.push_back(parse_bits(b));
    if (!bits_text.empty()) cfg.bits.erase(cfg.bits.begin());
    cfg.beta = {beta_re, beta_im};

    if (decomp->parsed()) {
      cfg.scenario = hbf::Scenario::kDecomp;
      cfg.sweep = sweep.value_or("n_rf");
    } else if (aeb->parsed()) {
      cfg.scenario = hbf::Scenario::kAeb;
      cfg.sweep = sweep.value_or(cfg.ue_angles_deg.size() >= 2 ? "n_tx" : "aod");
      if (aod.empty() && cfg.sweep == "aod") aod = {-80, -60, -40, -20, 0, 20, 40, 60, 80};
    } else if (quant->parsed()) {
      cfg.scenario = hbf::Scenario::kQuantBound;
      cfg.sweep = sweep.value_or("bits");
      if (bits_text.empty()) {
        cfg.bits.clear();
        for (int b = 1; b <= 6; ++b) cfg.bits.push_back(hbf::QuantizerSpec::finite(b));
      }
    }
    if (!aod.empty()) cfg.aod_deg = aod;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::kConfigError, "cannot create " + out_dir + ": " + ec.message());
    const fs::path out(out_dir);

    if (design->parsed()) {
      cfg.scenario = hbf::Scenario::kAeb;
      cfg.sweep = "n_tx";
      cfg.aod_deg = {cfg.codebook_center_deg};
      cfg.validate();
      write_file(out / "design.json", run_design(cfg));
      spdlog::info("wrote {}", (out / "design.json").string());
      return 0;
    }

    const auto result = hbf::run_experiment(cfg);
    write_file(out / "results.csv", hbf::rows_to_csv(result.rows));
    write_file(out / "timing.csv", hbf::timing_to_csv(result.rows));
    write_file(out / "results.json", hbf::result_to_json(cfg, result));
    if (cfg.scenario == hbf::Scenario::kQuantBound) {
      std::string csv = hbf::QuantBoundReport::csv_header() + "\n";
      for (const auto& r : result.quant_reports) csv += r.csv_row() + "\n";
      write_file(out / "quant_bound.csv", csv);
    }
    spdlog::info("wrote {} rows to {}", result.rows.size(), out.string());
    return 0;
  } catch (const Error& e) {
    std::cerr << "hbfprec: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigError ? kExitConfig : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "hbfprec: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
