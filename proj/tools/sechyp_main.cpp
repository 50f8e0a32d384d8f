#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sechyp/experiments.hpp"
#include "sechyp/version.hpp"

using namespace sechyp;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string out;
  std::string config;
  int jobs = 0;
  std::uint64_t seed = 12345;
  double tol = -1.0;  // <0: keep subcommand default
  PulseFamily pulse;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", out, "Output path (default: stdout)");
    cmd->add_option("--config", config, "JSON config file; explicit flags win");
    cmd->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
    cmd->add_option("--seed", seed, "Base RNG seed");
    cmd->add_option("--tol", tol, "Integrator rel/abs tolerance override");
    cmd->add_option("--mu", pulse.mu, "Sweep parameter mu");
    cmd->add_option("--beta-ratio", pulse.beta_ratio, "beta / omega0");
    cmd->add_option("--tg-ratio", pulse.tg_ratio, "t_g / t_fwhm");
    cmd->add_option("--theta-over-pi", theta_over_pi, "Conditional phase / pi");
  }

  double theta_over_pi = 1.0;

  json load_config(const CLI::App* cmd) {
    json doc;
    if (!config.empty()) {
      std::ifstream is(config);
      if (!is) throw CLI::ValidationError("--config", "cannot open " + config);
      is >> doc;
      // config supplies values only where the flag was not given
      auto fill = [&](const char* flag, const char* key, auto& target) {
        if (cmd->count(flag) == 0 && doc.contains(key)) target = doc.at(key);
      };
      fill("--jobs", "jobs", jobs);
      fill("--seed", "seed", seed);
      fill("--tol", "tol", tol);
      fill("--mu", "mu", pulse.mu);
      fill("--beta-ratio", "beta_ratio", pulse.beta_ratio);
      fill("--tg-ratio", "tg_ratio", pulse.tg_ratio);
      fill("--theta-over-pi", "theta_over_pi", theta_over_pi);
    }
    pulse.theta = theta_over_pi * M_PI;
    return doc;
  }
};

int emit(const std::function<ExperimentStatus(std::ostream&)>& run, const std::string& out) {
  std::ostringstream buffer;
  ExperimentStatus status;
  try {
    status = run(buffer);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (out.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "error: cannot write " << out << "\n";
      return 2;
    }
    os << buffer.str();
  }
  for (const auto& f : status.failures) std::cerr << "failed: " << f << "\n";
  return status.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sechyp: multi-qubit phase gates on blockaded registers driven by "
               "complex-hyperbolic-secant pulse pairs"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // transfer-error
  auto* te = app.add_subcommand("transfer-error",
                                "Two-level transfer error vs peak Rabi amplitude");
  CommonFlags te_common;
  te_common.attach(te);
  std::vector<double> te_scales, te_ratios;
  te->add_option("--scales", te_scales, "Amplitude scales |Omega|_max/Omega0");
  te->add_option("--tg-ratios", te_ratios, "Cutoff ratios t_g/t_fwhm");

  // sweep-n
  auto* sw = app.add_subcommand("sweep-n", "Gate error vs qubit count (modes a, b, c)");
  CommonFlags sw_common;
  sw_common.attach(sw);
  std::string sw_mode = "a", sw_initial = "uniform", sw_table = "sechyp_transfer_table.csv";
  int sw_nmin = -1, sw_nmax = -1, sw_full = 4, sw_nsim = 8;
  std::vector<double> sw_dw, sw_wt2, sw_dwt2;
  sw->add_option("--mode", sw_mode, "a (AC+transfer), b (dephasing), c (optimized)")
      ->check(CLI::IsMember({"a", "b", "c"}));
  sw->add_option("--n-min", sw_nmin, "Smallest register size");
  sw->add_option("--n-max", sw_nmax, "Largest register size");
  sw->add_option("--n-max-sim", sw_nsim, "Mode b: largest simulated n");
  sw->add_option("--full-check-max", sw_full, "Mode a: full-basis check up to this n");
  sw->add_option("--delta-omega", sw_dw, "Mode a: shift values / omega0");
  sw->add_option("--omega0-t2", sw_wt2, "Mode b: omega0*T2 values");
  sw->add_option("--delta-omega-t2", sw_dwt2, "Mode c: delta_omega*T2 values");
  sw->add_option("--initial", sw_initial, "uniform | ghz")
      ->check(CLI::IsMember({"uniform", "ghz"}));
  sw->add_option("--table", sw_table, "Mode c: transfer table cache path");

  // random-shifts
  auto* rs = app.add_subcommand("random-shifts",
                                "Gate error statistics over sampled blockade shifts");
  CommonFlags rs_common;
  rs_common.attach(rs);
  std::string rs_sign = "positive";
  int rs_nmin = 3, rs_nmax = 13, rs_samples = 100;
  double rs_min = 15.0, rs_max = 1500.0;
  rs->add_option("--sign", rs_sign, "positive | mixed")
      ->check(CLI::IsMember({"positive", "mixed"}));
  rs->add_option("--n-min", rs_nmin, "Smallest register size");
  rs->add_option("--n-max", rs_nmax, "Largest register size");
  rs->add_option("--samples", rs_samples, "Shift randomizations per n");
  rs->add_option("--range-min", rs_min, "Smallest |shift| / omega0");
  rs->add_option("--range-max", rs_max, "Largest |shift| / omega0");

  // theory-deviation
  auto* td = app.add_subcommand("theory-deviation",
                                "Per-sample estimate-vs-simulation relative deviation");
  CommonFlags td_common;
  td_common.attach(td);
  std::string td_sign = "positive";
  int td_nmin = 3, td_nmax = 13, td_samples = 100;
  double td_min = 15.0, td_max = 1500.0;
  td->add_option("--sign", td_sign, "positive | mixed")
      ->check(CLI::IsMember({"positive", "mixed"}));
  td->add_option("--n-min", td_nmin, "Smallest register size");
  td->add_option("--n-max", td_nmax, "Largest register size (<= 13)");
  td->add_option("--samples", td_samples, "Shift randomizations per n");
  td->add_option("--range-min", td_min, "Smallest |shift| / omega0");
  td->add_option("--range-max", td_max, "Largest |shift| / omega0");

  // gates
  auto* ga = app.add_subcommand("gates", "Emit gate-synthesis parameters as JSON");
  CommonFlags ga_common;
  ga_common.attach(ga);
  GatesConfig ga_cfg;
  std::vector<double> ga_axis = {0.0, 0.0, 1.0};
  ga->add_option("--kind", ga_cfg.kind, "toffoli | cphase | crotation | absorb")
      ->check(CLI::IsMember({"toffoli", "cphase", "crotation", "absorb"}));
  ga->add_option("--n", ga_cfg.n, "Number of qubits");
  ga->add_option("--gate-theta-over-pi", ga_cfg.theta_over_pi, "Gate angle / pi");
  ga->add_option("--axis", ga_axis, "crotation: rotation axis (3 components)");
  ga->add_option("--alpha-over-pi", ga_cfg.alpha_over_pi, "crotation: global phase / pi");
  std::string ga_absorb_file;
  ga->add_option("--absorb-file", ga_absorb_file, "absorb: JSON file with spec + gates");

  CLI11_PARSE(app, argc, argv);

  if (te->parsed()) {
    json doc = te_common.load_config(te);
    TransferErrorConfig cfg = TransferErrorConfig::defaults();
    cfg.pulse = te_common.pulse;
    cfg.jobs = te_common.jobs;
    if (te_common.tol > 0) cfg.tol = te_common.tol;
    if (!te_scales.empty()) cfg.scales = te_scales;
    if (!te_ratios.empty()) cfg.tg_ratios = te_ratios;
    if (doc.contains("scales") && te->count("--scales") == 0)
      cfg.scales = doc.at("scales").get<std::vector<double>>();
    if (doc.contains("tg_ratios") && te->count("--tg-ratios") == 0)
      cfg.tg_ratios = doc.at("tg_ratios").get<std::vector<double>>();
    return emit([&](std::ostream& os) { return run_transfer_error(cfg, os); }, te_common.out);
  }

  if (sw->parsed()) {
    json doc = sw_common.load_config(sw);
    SweepMode mode = sw_mode == "a" ? SweepMode::A : sw_mode == "b" ? SweepMode::B : SweepMode::C;
    SweepNConfig cfg = SweepNConfig::defaults(mode);
    cfg.pulse = sw_common.pulse;
    cfg.jobs = sw_common.jobs;
    if (sw_common.tol > 0) cfg.tol = sw_common.tol;
    if (sw_nmin > 0) cfg.n_min = sw_nmin;
    if (sw_nmax > 0) cfg.n_max = sw_nmax;
    cfg.n_max_sim = sw_nsim;
    cfg.full_check_max = sw_full;
    cfg.initial = sw_initial;
    cfg.table_path = sw_table;
    if (!sw_dw.empty()) cfg.delta_omega = sw_dw;
    if (!sw_wt2.empty()) cfg.omega0_t2 = sw_wt2;
    if (!sw_dwt2.empty()) cfg.delta_omega_t2 = sw_dwt2;
    return emit([&](std::ostream& os) { return run_sweep_n(cfg, os); }, sw_common.out);
  }

  if (rs->parsed()) {
    rs_common.load_config(rs);
    RandomShiftsConfig cfg;
    cfg.pulse = rs_common.pulse;
    cfg.jobs = rs_common.jobs;
    cfg.seed = rs_common.seed;
    if (rs_common.tol > 0) cfg.tol = rs_common.tol;
    cfg.n_min = rs_nmin;
    cfg.n_max = rs_nmax;
    cfg.samples = rs_samples;
    cfg.signed_shifts = rs_sign == "mixed";
    cfg.range_min = rs_min;
    cfg.range_max = rs_max;
    return emit([&](std::ostream& os) { return run_random_shifts(cfg, os); }, rs_common.out);
  }

  if (td->parsed()) {
    td_common.load_config(td);
    TheoryDeviationConfig cfg;
    cfg.core.pulse = td_common.pulse;
    cfg.core.jobs = td_common.jobs;
    cfg.core.seed = td_common.seed;
    if (td_common.tol > 0) cfg.core.tol = td_common.tol;
    cfg.core.n_min = td_nmin;
    cfg.core.n_max = td_nmax;
    cfg.core.samples = td_samples;
    cfg.core.signed_shifts = td_sign == "mixed";
    cfg.core.range_min = td_min;
    cfg.core.range_max = td_max;
    return emit([&](std::ostream& os) { return run_theory_deviation(cfg, os); }, td_common.out);
  }

  if (ga->parsed()) {
    ga_common.load_config(ga);
    if (ga_axis.size() != 3) {
      std::cerr << "error: --axis needs exactly 3 components\n";
      return 2;
    }
    for (int i = 0; i < 3; ++i) ga_cfg.axis[i] = ga_axis[i];
    if (!ga_absorb_file.empty()) {
      std::ifstream is(ga_absorb_file);
      if (!is) {
        std::cerr << "error: cannot open " << ga_absorb_file << "\n";
        return 2;
      }
      std::ostringstream ss;
      ss << is.rdbuf();
      ga_cfg.absorb_json = ss.str();
    }
    return emit([&](std::ostream& os) { return run_gates(ga_cfg, os); }, ga_common.out);
  }

  return 0;
}
