#include "sechyp/experiments.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sechyp/parallel.hpp"
#include "sechyp/version.hpp"

namespace sechyp {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_metadata(std::ostream& os, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  os << "# sechyp " << kVersion << " " << command << "\n";
  for (const auto& [k, v] : kv) os << "# " << k << " = " << v << "\n";
}

void pulse_metadata(std::vector<std::pair<std::string, std::string>>& kv,
                    const PulseFamily& p, double tol) {
  kv.emplace_back("mu", fmt(p.mu));
  kv.emplace_back("beta_ratio", fmt(p.beta_ratio));
  kv.emplace_back("tg_ratio", fmt(p.tg_ratio));
  kv.emplace_back("theta_over_pi", fmt(p.theta / M_PI));
  kv.emplace_back("rel_tol", fmt(tol));
  kv.emplace_back("abs_tol", fmt(tol));
}

IntegratorOptions tol_options(double tol) {
  IntegratorOptions o;
  o.rel_tol = tol;
  o.abs_tol = tol;
  return o;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, int n, int sample_index) {
  return splitmix64(base ^ (std::uint64_t(n) << 40) ^ std::uint64_t(sample_index));
}

TransferErrorConfig TransferErrorConfig::defaults() {
  TransferErrorConfig c;
  for (int i = 0; i <= 40; ++i) c.scales.push_back(1.0 + 2.0 * i / 40.0);
  c.tg_ratios = {4.0, 6.0, 8.0, 10.0};
  return c;
}

ExperimentStatus run_transfer_error(const TransferErrorConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  for (double s : cfg.scales)
    if (!(s > 0.0)) throw std::invalid_argument("transfer-error: scales must be > 0");
  for (double r : cfg.tg_ratios)
    if (!(r > 0.0)) throw std::invalid_argument("transfer-error: tg ratios must be > 0");

  std::vector<std::pair<std::string, std::string>> kv;
  pulse_metadata(kv, cfg.pulse, cfg.tol);
  kv.emplace_back("robust_regime_scale_min", fmt(cfg.pulse.mu * cfg.pulse.beta_ratio));
  write_metadata(os, "transfer-error", kv);
  os << "ratio,tg_ratio,transfer_error\n";

  const IntegratorOptions opts = tol_options(cfg.tol);
  const std::size_t count = cfg.scales.size() * cfg.tg_ratios.size();
  std::vector<double> err(count);
  parallel_for(count, cfg.jobs, [&](std::size_t idx) {
    std::size_t i = idx / cfg.tg_ratios.size();
    std::size_t j = idx % cfg.tg_ratios.size();
    PulseFamily fam = cfg.pulse;
    fam.tg_ratio = cfg.tg_ratios[j];
    cxd t = two_level_transfer(fam.params(), cfg.scales[i], fam.theta, opts);
    err[idx] = 1.0 - std::norm(t);
  });

  std::size_t idx = 0;
  for (double scale : cfg.scales)
    for (double ratio : cfg.tg_ratios) {
      os << fmt_short(scale) << ',' << fmt_short(ratio) << ',' << fmt_short(err[idx++]) << '\n';
      ++status.points_total;
    }
  return status;
}

SweepNConfig SweepNConfig::defaults(SweepMode mode) {
  SweepNConfig c;
  c.mode = mode;
  switch (mode) {
    case SweepMode::A:
      c.delta_omega = {30.0, 60.0, 120.0};
      break;
    case SweepMode::B:
      c.n_max = 15;
      c.omega0_t2 = {1e3, 1e4};
      break;
    case SweepMode::C:
      c.n_min = 2;
      c.n_max = 8;
      c.delta_omega_t2 = {1e3, 1e4, 1e5, 1e6};
      break;
  }
  return c;
}

namespace {

ExperimentStatus sweep_mode_a(const SweepNConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  const IntegratorOptions opts = tol_options(cfg.tol);
  const SechypParams p = cfg.pulse.params();
  const double theta = cfg.pulse.theta;
  const double lambda = pulse_area_lambda(p);
  const bool ghz = cfg.initial == "ghz";

  os << "n,delta_omega,eps_sim,eps_est,eps_full,full_gap\n";

  // Transfer factors (the delta = inf ladder) feed the estimate.
  std::vector<cxd> amps_inf = reduced_ground_amplitudes(cfg.n_max, p,
                                                        std::numeric_limits<double>::infinity(),
                                                        theta, opts, cfg.jobs);
  std::vector<cxd> transfer(amps_inf.size());
  for (std::size_t i = 0; i < amps_inf.size(); ++i)
    transfer[i] = amps_inf[i] * cxd(std::cos(theta), std::sin(theta));

  for (double dw : cfg.delta_omega) {
    std::vector<cxd> amps = reduced_ground_amplitudes(cfg.n_max, p, dw, theta, opts, cfg.jobs);
    std::vector<cxd> a(transfer.size());
    for (int n0 = 1; n0 <= cfg.n_max; ++n0)
      a[n0 - 1] = amplitude_factor(n0, transfer[n0 - 1], lambda, dw);

    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      double eps_sim;
      if (ghz) {
        // GHZ occupies only the n0 = 0 and n0 = n sectors.
        cxd overlap = 0.5 * (cxd(std::cos(theta), -std::sin(theta)) + amps[n - 1]);
        eps_sim = 1.0 - std::norm(overlap);
      } else {
        eps_sim = uniform_error_from_amplitudes(n, amps, theta);
      }
      double eps_est = ghz ? total_error_general(n, InitialStateSpec::ghz(), a, 0.0)
                           : total_error_uniform(n, a, 0.0);
      os << n << ',' << fmt_short(dw) << ',' << fmt_short(eps_sim) << ','
         << fmt_short(eps_est);
      if (n <= cfg.full_check_max && !ghz) {
        RegisterConfig rc = RegisterConfig::uniform(n, dw);
        auto basis = make_register_basis(rc);
        GateSpec spec = GateSpec::base_protocol(n, theta);
        QuantumState psi0 = QuantumState::uniform_superposition(basis);
        QuantumState fin = evolve_schrodinger(rc, spec, p, psi0, opts);
        double eps_full = gate_error(fin, psi0, spec);
        os << ',' << fmt_short(eps_full) << ',' << fmt_short(std::abs(eps_full - eps_sim));
      } else {
        os << ",,";
      }
      os << '\n';
      ++status.points_total;
    }
  }
  return status;
}

ExperimentStatus sweep_mode_b(const SweepNConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  const IntegratorOptions opts = tol_options(cfg.tol);
  const SechypParams p = cfg.pulse.params();
  const double theta = cfg.pulse.theta;
  const double t_g = p.t_cutoff;

  os << "n,omega0_t2,eps_sim,eps_est_lo,eps_est_mid,eps_est_hi,eps_deph_limit,saturating\n";

  std::vector<cxd> amps_inf = reduced_ground_amplitudes(cfg.n_max, p,
                                                        std::numeric_limits<double>::infinity(),
                                                        theta, opts, cfg.jobs);
  std::vector<cxd> transfer(amps_inf.size());
  for (std::size_t i = 0; i < amps_inf.size(); ++i)
    transfer[i] = amps_inf[i] * cxd(std::cos(theta), std::sin(theta));

  struct Row {
    int n;
    double t2;
    double sim = -1.0;
  };
  std::vector<Row> rows;
  for (double wt2 : cfg.omega0_t2)
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) rows.push_back({n, wt2});

  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    Row& row = rows[i];
    if (row.n > cfg.n_max_sim) return;
    RegisterConfig rc = RegisterConfig::uniform(
        row.n, std::numeric_limits<double>::infinity(), row.t2);
    auto basis = make_register_basis(rc);
    GateSpec spec = GateSpec::base_protocol(row.n, theta);
    QuantumState psi0 = QuantumState::uniform_superposition(basis);
    QuantumState rho = evolve_lindblad(rc, spec, p, psi0.to_density(), opts);
    row.sim = gate_error(rho, psi0, spec);
  });

  for (const Row& row : rows) {
    auto eps_at = [&](double alpha) {
      return total_error_uniform(row.n, transfer, alpha * t_g / row.t2);
    };
    double lo = eps_at(0.9), mid = eps_at(1.0), hi = eps_at(1.1);
    double gamma = t_g / row.t2;
    double limit = 1.0 - std::exp(-2.0 * gamma);
    bool saturating = row.n >= 10 && mid >= 0.8 * limit;
    os << row.n << ',' << fmt_short(row.t2) << ',';
    if (row.sim >= 0.0) os << fmt_short(row.sim);
    os << ',' << fmt_short(lo) << ',' << fmt_short(mid) << ',' << fmt_short(hi) << ','
       << fmt_short(limit) << ',' << (saturating ? 1 : 0) << '\n';
    ++status.points_total;
  }
  return status;
}

ExperimentStatus sweep_mode_c(const SweepNConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  TransferTableKey key;
  key.mu = cfg.pulse.mu;
  key.beta_ratio = cfg.pulse.beta_ratio;
  key.theta = cfg.pulse.theta;
  TransferTable table = TransferTable::load_or_build(key, cfg.table_path, cfg.jobs);

  os << "n,delta_omega_t2,omega0_opt,tg_ratio_opt,eps_min,evaluations\n";
  for (int n = cfg.n_min; n <= cfg.n_max; ++n)
    for (double dwt2 : cfg.delta_omega_t2) {
      OptimizeResult r = optimize_gate_params(n, dwt2, table);
      os << n << ',' << fmt_short(dwt2) << ',' << fmt_short(r.omega0_opt) << ','
         << fmt_short(r.tg_ratio_opt) << ',' << fmt_short(r.epsilon_min) << ','
         << r.evaluations << '\n';
      ++status.points_total;
    }
  return status;
}

}  // namespace

ExperimentStatus run_sweep_n(const SweepNConfig& cfg, std::ostream& os) {
  std::vector<std::pair<std::string, std::string>> kv;
  pulse_metadata(kv, cfg.pulse, cfg.tol);
  kv.emplace_back("mode", cfg.mode == SweepMode::A ? "a" : cfg.mode == SweepMode::B ? "b" : "c");
  kv.emplace_back("initial", cfg.initial);
  write_metadata(os, "sweep-n", kv);
  switch (cfg.mode) {
    case SweepMode::A:
      return sweep_mode_a(cfg, os);
    case SweepMode::B:
      return sweep_mode_b(cfg, os);
    case SweepMode::C:
      return sweep_mode_c(cfg, os);
  }
  return {};
}

std::vector<ShiftSampleResult> run_shift_samples(int n, const RandomShiftsConfig& cfg,
                                                 const ArbitraryShiftEstimator& estimator) {
  const IntegratorOptions opts = tol_options(cfg.tol);
  const SechypParams p = cfg.pulse.params();
  std::vector<ShiftSampleResult> results(static_cast<std::size_t>(cfg.samples));

  parallel_for(results.size(), cfg.jobs, [&](std::size_t i) {
    ShiftDistribution dist;
    dist.min_abs = cfg.range_min;
    dist.max_abs = cfg.range_max;
    dist.signed_mode = cfg.signed_shifts;
    dist.seed = derive_seed(cfg.seed, n, static_cast<int>(i));
    Eigen::MatrixXd shifts = sample_shifts(dist, n);

    ShiftSampleResult& r = results[i];
    r.eps_sim = uniform_error_blockwise(shifts, p, cfg.pulse.theta, opts, 1);
    try {
      RegisterConfig rc = RegisterConfig::with_shifts(shifts);
      r.eps_est = estimator.estimate(rc, InitialStateSpec::uniform(), false, 1);
    } catch (const SingularRecursionError& e) {
      r.est_failed = true;
      r.message = e.what();
    }
  });
  return results;
}

ExperimentStatus run_random_shifts(const RandomShiftsConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  std::vector<std::pair<std::string, std::string>> kv;
  pulse_metadata(kv, cfg.pulse, cfg.tol);
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("rng", kShiftRngName);
  kv.emplace_back("samples", std::to_string(cfg.samples));
  kv.emplace_back("sign", cfg.signed_shifts ? "mixed" : "positive");
  kv.emplace_back("range", fmt_short(cfg.range_min) + ".." + fmt_short(cfg.range_max));
  write_metadata(os, "random-shifts", kv);
  os << "n,sign,samples,eps_sim_mean,eps_sim_std,eps_est_mean,eps_est_std,"
        "eps_est_avg_shortcut\n";

  const IntegratorOptions opts = tol_options(cfg.tol);
  ArbitraryShiftEstimator estimator(cfg.pulse.params(), cfg.pulse.theta, cfg.n_max, opts,
                                    cfg.jobs);

  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    auto samples = run_shift_samples(n, cfg, estimator);

    double sim_mean = 0, sim_m2 = 0, est_mean = 0, est_m2 = 0;
    int est_count = 0;
    for (const auto& s : samples) {
      sim_mean += s.eps_sim;
      if (!s.est_failed) {
        est_mean += s.eps_est;
        ++est_count;
      } else {
        ++status.points_failed;
        status.failures.push_back("n=" + std::to_string(n) + ": " + s.message);
      }
    }
    sim_mean /= samples.size();
    if (est_count > 0) est_mean /= est_count;
    for (const auto& s : samples) {
      sim_m2 += (s.eps_sim - sim_mean) * (s.eps_sim - sim_mean);
      if (!s.est_failed) est_m2 += (s.eps_est - est_mean) * (s.eps_est - est_mean);
    }
    double sim_std = std::sqrt(sim_m2 / samples.size());
    double est_std = est_count > 0 ? std::sqrt(est_m2 / est_count) : 0.0;

    // Positive-shift shortcut at the distribution's harmonic-average shift.
    std::string shortcut;
    if (!cfg.signed_shifts) {
      double inv_mean = 0.5 * (1.0 / cfg.range_min + 1.0 / cfg.range_max);
      RegisterConfig rc = RegisterConfig::uniform(n, 1.0 / inv_mean);
      shortcut = fmt_short(estimator.estimate(rc, InitialStateSpec::uniform(), false, cfg.jobs));
    }

    os << n << ',' << (cfg.signed_shifts ? "mixed" : "positive") << ',' << samples.size()
       << ',' << fmt_short(sim_mean) << ',' << fmt_short(sim_std) << ','
       << fmt_short(est_mean) << ',' << fmt_short(est_std) << ',' << shortcut << '\n';
    ++status.points_total;
  }
  return status;
}

ExperimentStatus run_theory_deviation(const TheoryDeviationConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  const RandomShiftsConfig& core = cfg.core;
  if (core.n_max > 13)
    throw std::invalid_argument("theory-deviation: n capped at 13");

  std::vector<std::pair<std::string, std::string>> kv;
  pulse_metadata(kv, core.pulse, core.tol);
  kv.emplace_back("seed", std::to_string(core.seed));
  kv.emplace_back("rng", kShiftRngName);
  kv.emplace_back("samples", std::to_string(core.samples));
  kv.emplace_back("sign", core.signed_shifts ? "mixed" : "positive");
  write_metadata(os, "theory-deviation", kv);
  os << "row,n,sample,eps_sim,eps_est,rel_dev\n";

  const IntegratorOptions opts = tol_options(core.tol);
  ArbitraryShiftEstimator estimator(core.pulse.params(), core.pulse.theta, core.n_max, opts,
                                    core.jobs);

  for (int n = core.n_min; n <= core.n_max; ++n) {
    auto samples = run_shift_samples(n, core, estimator);
    double mean_sim = 0, mean_est = 0, mean_dev = 0;
    int ok_count = 0, dev_count = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      os << "sample," << n << ',' << i << ',' << fmt_short(s.eps_sim) << ',';
      if (s.est_failed) {
        os << ",\n";
        ++status.points_failed;
        status.failures.push_back("n=" + std::to_string(n) + ": " + s.message);
        continue;
      }
      os << fmt_short(s.eps_est) << ',';
      mean_sim += s.eps_sim;
      mean_est += s.eps_est;
      ++ok_count;
      if (s.eps_sim > 0.0) {  // division guard: zero-error rows carry no relative deviation
        double dev = (s.eps_est - s.eps_sim) / s.eps_sim;
        os << fmt_short(dev);
        mean_dev += std::abs(dev);
        ++dev_count;
      }
      os << '\n';
      ++status.points_total;
    }
    if (ok_count > 0) {
      mean_sim /= ok_count;
      mean_est /= ok_count;
    }
    os << "mean," << n << ",," << fmt_short(mean_sim) << ',' << fmt_short(mean_est) << ','
       << (dev_count > 0 ? fmt_short(mean_dev / dev_count) : "") << '\n';
  }
  return status;
}

ExperimentStatus run_gates(const GatesConfig& cfg, std::ostream& os) {
  ExperimentStatus status;
  status.points_total = 1;

  json out;
  out["metadata"] = {{"version", kVersion}, {"command", "gates"}};

  auto spec_json = [](const GateSpec& s) {
    json j;
    for (double e : s.eta) j["eta_over_pi"].push_back(e / M_PI);
    for (double g : s.gamma) j["gamma_over_pi"].push_back(g / M_PI);
    j["theta_over_pi"] = s.theta / M_PI;
    return j;
  };

  if (cfg.kind == "toffoli") {
    out["gate"] = "toffoli";
    out["label"] = "C" + std::to_string(cfg.n - 1) + "-X";
    out["spec"] = spec_json(toffoli_spec(cfg.n));
  } else if (cfg.kind == "cphase") {
    double theta = cfg.theta_over_pi * M_PI;
    out["gate"] = "cphase";
    std::string suffix = cfg.theta_over_pi == 1.0    ? "Z"
                         : cfg.theta_over_pi == 0.5  ? "S"
                         : cfg.theta_over_pi == 0.25 ? "T"
                                                     : "P(" + fmt_short(cfg.theta_over_pi) + "pi)";
    out["label"] = "C" + std::to_string(cfg.n - 1) + "-" + suffix;
    out["spec"] = spec_json(controlled_phase_spec(cfg.n, theta));
  } else if (cfg.kind == "crotation") {
    Eigen::Vector3d axis(cfg.axis[0], cfg.axis[1], cfg.axis[2]);
    RotationPlan plan =
        controlled_rotation_plan(axis, cfg.theta_over_pi * M_PI, cfg.alpha_over_pi * M_PI, cfg.n);
    out["gate"] = "crotation";
    out["label"] = "C" + std::to_string(cfg.n - 1) + "-R";
    out["spec"] = spec_json(plan.spec);
    out["alpha_prime_over_pi"] = plan.residual_phase / M_PI;
    out["directly_realizable"] = plan.directly_realizable;
    if (!plan.directly_realizable)
      out["note"] = "apply a second operation with theta = alpha_prime on the controls";
  } else if (cfg.kind == "absorb") {
    json in = json::parse(cfg.absorb_json);
    GateSpec spec;
    for (double e : in.at("spec").at("eta_over_pi")) spec.eta.push_back(e * M_PI);
    for (double g : in.at("spec").at("gamma_over_pi")) spec.gamma.push_back(g * M_PI);
    spec.theta = in.at("spec").at("theta_over_pi").get<double>() * M_PI;
    std::vector<SingleQubitGate> gates;
    for (const auto& gj : in.at("gates")) {
      Eigen::Matrix2cd m;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          m(r, c) = cxd(gj.at(r).at(c).at(0).get<double>(), gj.at(r).at(c).at(1).get<double>());
      gates.push_back(SingleQubitGate::from_matrix(m));
    }
    out["gate"] = "absorb";
    out["spec"] = spec_json(absorb_single_qubit_gates(gates, spec));
  } else {
    throw std::invalid_argument("gates: unknown kind '" + cfg.kind + "'");
  }

  os << out.dump(2) << '\n';
  return status;
}

RegisterConfig register_from_json_text(const std::string& text) {
  json j = json::parse(text);
  RegisterConfig cfg;
  cfg.n = j.at("n").get<int>();

  auto parse_scalar = [](const json& v) {
    if (v.is_string() && v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    return v.get<double>();
  };

  const json& shifts = j.at("shifts");
  if (shifts.is_number() || shifts.is_string()) {
    double v = parse_scalar(shifts);
    cfg.shifts = Eigen::MatrixXd::Constant(cfg.n, cfg.n, v);
    cfg.shifts.diagonal().setZero();
  } else if (shifts.is_array()) {
    cfg.shifts = Eigen::MatrixXd::Zero(cfg.n, cfg.n);
    for (int q = 0; q < cfg.n; ++q)
      for (int p = 0; p < cfg.n; ++p) cfg.shifts(q, p) = parse_scalar(shifts.at(q).at(p));
  } else {
    ShiftDistribution dist;
    dist.min_abs = shifts.at("min").get<double>();
    dist.max_abs = shifts.at("max").get<double>();
    dist.signed_mode = shifts.value("signed", false);
    dist.seed = shifts.value("seed", std::uint64_t(0));
    cfg.shifts = sample_shifts(dist, cfg.n);
  }
  if (j.contains("t2")) cfg.t2 = parse_scalar(j.at("t2"));
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  cfg.validate();
  return cfg;
}

}  // namespace sechyp
