#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>

#include "sechyp/pulse.hpp"

namespace sechyp {

/// Qubit register: pair blockade shifts, excited-state coherence time, and the
/// excited-residence fraction alpha used in the dephasing exponent gamma.
struct RegisterConfig {
  int n = 1;
  Eigen::MatrixXd shifts;  // n x n symmetric, diagonal unused; +inf entries allowed
  double t2 = std::numeric_limits<double>::infinity();
  double alpha = 1.0;

  static RegisterConfig uniform(int n, double delta_omega,
                                double t2 = std::numeric_limits<double>::infinity(),
                                double alpha = 1.0);
  static RegisterConfig with_shifts(Eigen::MatrixXd shifts,
                                    double t2 = std::numeric_limits<double>::infinity(),
                                    double alpha = 1.0);

  void validate() const;  // throws std::invalid_argument
  bool all_shifts_infinite() const;
  bool all_shifts_positive() const;
  double min_abs_shift() const;

  /// min |shift| divided by max(sqrt(2(n-1))*omega0, mu*beta). Values well above 1
  /// indicate the blockade regime; advisory only.
  double blockade_margin(const SechypParams& p) const;
};

/// Uniform distribution of inverse shifts: 1/|shift| ~ U[1/max_abs, 1/min_abs],
/// modelling 1/r^3 pair interactions. In signed mode each pair's sign is drawn
/// independently with probability 1/2.
struct ShiftDistribution {
  double min_abs = 0.0;
  double max_abs = 0.0;
  bool signed_mode = false;
  std::uint64_t seed = 0;

  void validate() const;  // requires 0 < min_abs < max_abs
};

/// Name of the generator behind sample_shifts, recorded in output metadata.
inline constexpr const char* kShiftRngName = "mt19937_64";

/// Draws a symmetric n x n shift matrix, one independent draw per unordered pair
/// in row-major (q < p) order. Deterministic for a given seed: the uniform variate
/// is (r >> 11) * 2^-53 from raw mt19937_64 output, independent of the standard
/// library's distribution implementations.
Eigen::MatrixXd sample_shifts(const ShiftDistribution& dist, int n);

/// 1 / <1/shift> over all unordered pairs. Throws std::domain_error on any zero.
double average_shift(const Eigen::MatrixXd& shifts);

}  // namespace sechyp
