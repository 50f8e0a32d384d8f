#pragma once

#include <complex>

namespace sechyp {

using cxd = std::complex<double>;

/// Parameters of the complex hyperbolic-secant (sechyp) drive
///   Omega(t) = omega0 * sech(beta*(t - t_cutoff/2))^(1 + i*mu) * exp(i*phase_offset)
/// defined on t in [0, t_cutoff]. All rates are angular-frequency units.
struct SechypParams {
  double omega0 = 1.0;       // peak Rabi frequency
  double mu = 3.0;           // dimensionless sweep parameter
  double beta = 1.0 / 3.0;   // sweep rate
  double t_cutoff = 0.0;     // pulse duration t_g
  double phase_offset = 0.0; // constant drive phase, radians

  /// Pulse from the dimensionless family (mu, beta/omega0, t_g/t_fwhm).
  static SechypParams family(double mu, double beta_ratio, double tg_ratio,
                             double omega0 = 1.0);

  /// Throws std::invalid_argument unless omega0, beta, t_cutoff > 0.
  void validate() const;

  /// Robustness regime of the transfer: omega0 >= mu*beta and mu >= 2.
  bool robust_regime() const { return omega0 >= mu * beta && mu >= 2.0; }
};

struct PulseWidths {
  double t_fwhm;   // fwhm in intensity, 2*ln(1+sqrt(2))/beta
  double f_width;  // swept frequency width in ordinary-frequency units, mu*beta/pi
};

/// Omega(t). The complex power uses the real logarithm of sech (sech > 0 on the
/// real line), i.e. sech(x)^(1+i*mu) = sech(x) * exp(i*mu*ln(sech(x))), so the
/// phase convention is fixed. Throws std::domain_error for t outside [0, t_cutoff].
cxd envelope(const SechypParams& p, double t);

/// Time derivative of the drive phase: -mu*beta*tanh(beta*(t - t_g/2)).
/// Diagnostic only; the chirp is carried entirely by the phase of envelope().
double instantaneous_detuning(const SechypParams& p, double t);

/// Lambda = integral of |Omega|^2 over one pulse = (2*omega0^2/beta)*tanh(beta*t_g/2).
double pulse_area_lambda(const SechypParams& p);

PulseWidths derived_widths(const SechypParams& p);

/// The deexcitation pulse of the pair: identical parameters with the drive phase
/// advanced by pi + theta.
SechypParams second_pulse(const SechypParams& p, double theta);

}  // namespace sechyp
