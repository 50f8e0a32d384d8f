#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sechyp/dynamics.hpp"
#include "sechyp/qregister.hpp"

namespace sechyp {

struct TransferTableKey {
  double mu = 3.0;
  double beta_ratio = 1.0 / 3.0;  // beta / omega0
  double theta = M_PI;
  int n_max = 50;
  double ratio_min = 2.0;
  double ratio_max = 10.0;
  int ratio_count = 100;
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;

  bool matches(const TransferTableKey& other) const;
};

/// Grid of transfer factors T(n0, t_g/t_fwhm) for the pulse family (mu, beta_ratio),
/// queried by bilinear interpolation. Building the default 50 x 100 grid costs
/// 5000 two-level simulations, so tables are persisted and keyed by their
/// parameters; a mismatching file on disk is rebuilt.
class TransferTable {
 public:
  static TransferTable build(const TransferTableKey& key, int jobs);
  static std::optional<TransferTable> load(const std::string& path);
  static TransferTable load_or_build(const TransferTableKey& key, const std::string& path,
                                     int jobs);

  cxd at_node(int n0, int ratio_index) const;
  double ratio_node(int ratio_index) const;
  /// Bilinear interpolation; throws std::domain_error outside the grid.
  cxd interpolate(double n0, double ratio) const;
  void save(const std::string& path) const;
  const TransferTableKey& key() const { return key_; }

 private:
  TransferTableKey key_;
  Eigen::MatrixXcd t_;  // n_max rows x ratio_count cols
};

/// A(n0) = T * exp(i * 2(n0-1) * Lambda / (4 * delta_omega_eff)). Infinite
/// delta_omega_eff returns T unchanged; zero throws std::domain_error.
cxd amplitude_factor(int n0, cxd transfer, double lambda, double delta_omega_eff);

/// Total gate error for the even superposition of all computational states,
/// with per-sector amplitude factors A (A[i] = A(n0 = i + 1)) and dephasing
/// exponent gamma. Evaluated with cached binomials (exact through n = 55,
/// log-space beyond) and compensated summation; exact 0 for A = 1, gamma = 0.
double total_error_uniform(int n, std::span<const cxd> amplitude_factors, double gamma);

/// Sector-probability description of the initial state: P(n0) is the total
/// probability of the computational states with n0 qubits in |0>.
struct InitialStateSpec {
  enum class Kind { Uniform, Ghz, Explicit };
  Kind kind = Kind::Uniform;
  std::vector<double> probs;  // Explicit: size n + 1, indexed by n0

  static InitialStateSpec uniform();
  static InitialStateSpec ghz();
  static InitialStateSpec explicit_probs(std::vector<double> p);

  std::vector<double> probabilities(int n) const;  // validated, size n + 1
};

/// Error estimate for an arbitrary initial state from its sector probabilities.
double total_error_general(int n, const InitialStateSpec& initial,
                           std::span<const cxd> amplitude_factors, double gamma);

/// Closed-form error estimate with per-pair blockade shifts. Caches the transfer
/// factors T(n0) of a pulse family so repeated estimates (e.g. across shift
/// samples) do not redo the two-level simulations.
class ArbitraryShiftEstimator {
 public:
  ArbitraryShiftEstimator(const SechypParams& p, double theta, int n_max,
                          const IntegratorOptions& opts, int jobs);

  /// Chain mode walks every computational state (guarded at n <= 20) and pairs
  /// per-state amplitude factors with the same overlap-count combinatorics as
  /// the uniform-shift formula. The positive-shift shortcut replaces every
  /// effective shift by the harmonic-average shift.
  double estimate(const RegisterConfig& cfg, const InitialStateSpec& initial,
                  bool average_shift_shortcut, int jobs) const;

  cxd transfer(int n0) const { return t_.at(static_cast<std::size_t>(n0 - 1)); }
  double lambda() const { return lambda_; }
  double theta() const { return theta_; }

 private:
  SechypParams pulse_;
  double theta_;
  double lambda_;
  std::vector<cxd> t_;
};

double estimate_with_arbitrary_shifts(const RegisterConfig& cfg, const SechypParams& p,
                                      double theta, const InitialStateSpec& initial,
                                      bool average_shift_shortcut,
                                      const IntegratorOptions& opts, int jobs);

}  // namespace sechyp
