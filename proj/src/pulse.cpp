#include "sechyp/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace sechyp {

SechypParams SechypParams::family(double mu, double beta_ratio, double tg_ratio,
                                  double omega0) {
  SechypParams p;
  p.omega0 = omega0;
  p.mu = mu;
  p.beta = beta_ratio * omega0;
  p.t_cutoff = tg_ratio * 2.0 * std::log(1.0 + std::sqrt(2.0)) / p.beta;
  p.phase_offset = 0.0;
  p.validate();
  return p;
}

void SechypParams::validate() const {
  if (!(omega0 > 0.0)) throw std::invalid_argument("SechypParams: omega0 must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("SechypParams: beta must be > 0");
  if (!(t_cutoff > 0.0)) throw std::invalid_argument("SechypParams: t_cutoff must be > 0");
}

static void check_domain(const SechypParams& p, double t) {
  if (t < 0.0 || t > p.t_cutoff)
    throw std::domain_error("sechyp pulse evaluated outside [0, t_g]");
}

cxd envelope(const SechypParams& p, double t) {
  check_domain(p, t);
  const double x = p.beta * (t - 0.5 * p.t_cutoff);
  const double sech = 1.0 / std::cosh(x);
  const double phase = p.mu * std::log(sech) + p.phase_offset;
  return p.omega0 * sech * cxd(std::cos(phase), std::sin(phase));
}

double instantaneous_detuning(const SechypParams& p, double t) {
  check_domain(p, t);
  return -p.mu * p.beta * std::tanh(p.beta * (t - 0.5 * p.t_cutoff));
}

double pulse_area_lambda(const SechypParams& p) {
  return 2.0 * p.omega0 * p.omega0 / p.beta * std::tanh(0.5 * p.beta * p.t_cutoff);
}

PulseWidths derived_widths(const SechypParams& p) {
  PulseWidths w;
  w.t_fwhm = 2.0 * std::log(1.0 + std::sqrt(2.0)) / p.beta;
  w.f_width = p.mu * p.beta / M_PI;
  return w;
}

SechypParams second_pulse(const SechypParams& p, double theta) {
  SechypParams q = p;
  q.phase_offset += M_PI + theta;
  return q;
}

}  // namespace sechyp
