#include "sechyp/qregister.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sechyp {

RegisterConfig RegisterConfig::uniform(int n, double delta_omega, double t2, double alpha) {
  RegisterConfig cfg;
  cfg.n = n;
  cfg.shifts = Eigen::MatrixXd::Constant(n, n, delta_omega);
  cfg.shifts.diagonal().setZero();
  cfg.t2 = t2;
  cfg.alpha = alpha;
  cfg.validate();
  return cfg;
}

RegisterConfig RegisterConfig::with_shifts(Eigen::MatrixXd shifts, double t2, double alpha) {
  RegisterConfig cfg;
  cfg.n = static_cast<int>(shifts.rows());
  cfg.shifts = std::move(shifts);
  cfg.t2 = t2;
  cfg.alpha = alpha;
  cfg.validate();
  return cfg;
}

void RegisterConfig::validate() const {
  if (n < 1) throw std::invalid_argument("RegisterConfig: n must be >= 1");
  if (shifts.rows() != n || shifts.cols() != n)
    throw std::invalid_argument("RegisterConfig: shift matrix must be n x n");
  for (int q = 0; q < n; ++q)
    for (int p = q + 1; p < n; ++p) {
      double a = shifts(q, p), b = shifts(p, q);
      bool equal = (a == b) || (std::isinf(a) && std::isinf(b) && std::signbit(a) == std::signbit(b));
      if (!equal) throw std::invalid_argument("RegisterConfig: shift matrix must be symmetric");
    }
  if (!(t2 > 0.0)) throw std::invalid_argument("RegisterConfig: t2 must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("RegisterConfig: alpha must be > 0");
}

bool RegisterConfig::all_shifts_infinite() const {
  for (int q = 0; q < n; ++q)
    for (int p = q + 1; p < n; ++p)
      if (!std::isinf(shifts(q, p))) return false;
  return true;
}

bool RegisterConfig::all_shifts_positive() const {
  for (int q = 0; q < n; ++q)
    for (int p = q + 1; p < n; ++p)
      if (!(shifts(q, p) > 0.0)) return false;
  return true;
}

double RegisterConfig::min_abs_shift() const {
  double m = std::numeric_limits<double>::infinity();
  for (int q = 0; q < n; ++q)
    for (int p = q + 1; p < n; ++p) m = std::min(m, std::abs(shifts(q, p)));
  return m;
}

double RegisterConfig::blockade_margin(const SechypParams& p) const {
  double drive = std::max(std::sqrt(2.0 * (n - 1)) * p.omega0, p.mu * p.beta);
  return min_abs_shift() / drive;
}

void ShiftDistribution::validate() const {
  if (!(min_abs > 0.0) || !(min_abs < max_abs))
    throw std::invalid_argument("ShiftDistribution: requires 0 < min_abs < max_abs");
}

Eigen::MatrixXd sample_shifts(const ShiftDistribution& dist, int n) {
  dist.validate();
  if (n < 1) throw std::invalid_argument("sample_shifts: n must be >= 1");
  std::mt19937_64 rng(dist.seed);
  auto u01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const double inv_lo = 1.0 / dist.max_abs;
  const double inv_hi = 1.0 / dist.min_abs;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < n; ++q) {
    for (int p = q + 1; p < n; ++p) {
      double inv = inv_lo + (inv_hi - inv_lo) * u01();
      double shift = 1.0 / inv;
      if (dist.signed_mode && (rng() & 1u)) shift = -shift;
      m(q, p) = shift;
      m(p, q) = shift;
    }
  }
  return m;
}

double average_shift(const Eigen::MatrixXd& shifts) {
  const int n = static_cast<int>(shifts.rows());
  if (n < 2) throw std::domain_error("average_shift: need at least one pair");
  double sum = 0.0;
  int count = 0;
  for (int q = 0; q < n; ++q) {
    for (int p = q + 1; p < n; ++p) {
      double s = shifts(q, p);
      if (s == 0.0) throw std::domain_error("average_shift: zero shift");
      sum += 1.0 / s;
      ++count;
    }
  }
  if (sum == 0.0) throw std::domain_error("average_shift: reciprocals sum to zero");
  return static_cast<double>(count) / sum;
}

}  // namespace sechyp
