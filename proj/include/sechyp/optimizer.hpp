#pragma once

#include <Eigen/Dense>
#include <functional>

#include "sechyp/errmodel.hpp"

namespace sechyp {

struct NelderMeadOptions {
  double simplex_rel_tol = 1e-6;
  int max_evals = 2000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
  bool aborted_nan = false;  // objective returned NaN; x/fx hold the best so far
};

/// Standard Nelder-Mead simplex search with reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5. Terminates when the simplex diameter falls
/// below simplex_rel_tol relative to the best vertex, or at max_evals.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& initial_step,
                             const NelderMeadOptions& opts = {});

struct OptimizeResult {
  double omega0_opt = 0.0;    // in units of the blockade shift
  double tg_ratio_opt = 0.0;  // t_g / t_fwhm, within the table domain
  double epsilon_min = 1.0;
  long evaluations = 0;
};

/// Minimizes the uniform-superposition error estimate over (omega0, t_g/t_fwhm)
/// for a register of n qubits at the given delta_omega * T2 product (units with
/// delta_omega = 1). The transfer factor comes from the table; the cutoff ratio
/// is confined to the table domain by a large finite penalty. Multiple fixed
/// starting points guard against the transfer-error oscillation's local minima,
/// so repeated calls are deterministic.
OptimizeResult optimize_gate_params(int n, double delta_omega_t2, const TransferTable& table,
                                    double alpha = 1.0, const NelderMeadOptions& opts = {});

}  // namespace sechyp
