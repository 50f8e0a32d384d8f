#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sechyp/errmodel.hpp"
#include "sechyp/optimizer.hpp"

namespace sechyp {

/// Dimensionless description of the drive family used across experiments;
/// omega0 = 1 sets the internal angular-frequency scale.
struct PulseFamily {
  double mu = 3.0;
  double beta_ratio = 1.0 / 3.0;  // beta / omega0
  double tg_ratio = 6.0;          // t_g / t_fwhm
  double theta = M_PI;

  SechypParams params(double omega0 = 1.0) const {
    return SechypParams::family(mu, beta_ratio, tg_ratio, omega0);
  }
};

struct ExperimentStatus {
  int points_total = 0;
  int points_failed = 0;
  std::vector<std::string> failures;

  bool ok() const { return points_failed == 0; }
};

struct TransferErrorConfig {
  std::vector<double> scales;     // |Omega|_max / Omega0 sweep
  std::vector<double> tg_ratios;  // t_g / t_fwhm values
  PulseFamily pulse;
  double tol = 1e-10;
  int jobs = 0;

  static TransferErrorConfig defaults();
};

enum class SweepMode { A, B, C };

struct SweepNConfig {
  SweepMode mode = SweepMode::A;
  int n_min = 2;
  int n_max = 50;                       // mode b caps simulation at n_max_sim
  int n_max_sim = 8;                    // Lindblad limit (mode b)
  int full_check_max = 4;               // mode a: compare against the full basis up to here
  std::vector<double> delta_omega;      // mode a, units of omega0
  std::vector<double> omega0_t2;        // mode b
  std::vector<double> delta_omega_t2;   // mode c
  std::string initial = "uniform";      // uniform | ghz (estimate column)
  PulseFamily pulse;
  double tol = 1e-10;
  int jobs = 0;
  std::string table_path = "sechyp_transfer_table.csv";  // mode c

  static SweepNConfig defaults(SweepMode mode);
};

struct RandomShiftsConfig {
  int n_min = 3;
  int n_max = 13;
  int samples = 100;
  bool signed_shifts = false;  // positive | mixed
  double range_min = 15.0;     // units of omega0
  double range_max = 1500.0;
  std::uint64_t seed = 12345;
  PulseFamily pulse;
  double tol = 1e-8;  // the random-shift experiments run at 1e-8
  int jobs = 0;
};

struct TheoryDeviationConfig {
  RandomShiftsConfig core;  // same sampling machinery; n capped at 13
};

struct GatesConfig {
  std::string kind = "toffoli";  // toffoli | cphase | crotation | absorb
  int n = 3;
  double theta_over_pi = 1.0;                  // cphase / crotation
  double axis[3] = {0.0, 0.0, 1.0};            // crotation
  double alpha_over_pi = 0.0;                  // crotation
  std::string absorb_json;                     // absorb: inline JSON document
};

ExperimentStatus run_transfer_error(const TransferErrorConfig& cfg, std::ostream& os);
ExperimentStatus run_sweep_n(const SweepNConfig& cfg, std::ostream& os);
ExperimentStatus run_random_shifts(const RandomShiftsConfig& cfg, std::ostream& os);
ExperimentStatus run_theory_deviation(const TheoryDeviationConfig& cfg, std::ostream& os);
ExperimentStatus run_gates(const GatesConfig& cfg, std::ostream& os);

/// One (simulation, estimate) pair per shift sample; shared by the random-shift
/// and theory-deviation experiments and by the acceptance suite.
struct ShiftSampleResult {
  double eps_sim = 0.0;
  double eps_est = 0.0;
  bool est_failed = false;
  std::string message;
};
std::vector<ShiftSampleResult> run_shift_samples(int n, const RandomShiftsConfig& cfg,
                                                 const ArbitraryShiftEstimator& estimator);

/// Sample seed derivation (splitmix64 over base/n/index), exposed for reproducibility.
std::uint64_t derive_seed(std::uint64_t base, int n, int sample_index);

/// RegisterConfig from the documented JSON schema:
/// {"n": 4, "shifts": 30.0 | [[...]] | {"min":15,"max":1500,"signed":false,"seed":7},
///  "t2": 1e4, "alpha": 1.0}  ("inf" allowed for t2; shifts may be "inf").
RegisterConfig register_from_json_text(const std::string& text);

}  // namespace sechyp
