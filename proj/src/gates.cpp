#include "sechyp/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace sechyp {

namespace {

constexpr double kUnitaryTol = 1e-12;

double wrap_angle(double a) {
  // wrap to (-pi, pi]
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

void check_unitary(const Eigen::Matrix2cd& u) {
  Eigen::Matrix2cd d = u.adjoint() * u - Eigen::Matrix2cd::Identity();
  if (d.cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("SingleQubitGate: matrix is not unitary");
}

}  // namespace

void GateSpec::validate() const {
  if (eta.empty()) throw std::invalid_argument("GateSpec: needs at least one qubit");
  if (gamma.size() != eta.size())
    throw std::invalid_argument("GateSpec: eta and gamma must have equal length");
}

GateSpec GateSpec::base_protocol(int n, double theta) {
  GateSpec s;
  s.eta.assign(n, M_PI);
  s.gamma.assign(n, 0.0);
  s.theta = theta;
  return s;
}

std::pair<cxd, cxd> drive_fields(double eta, double gamma_drive, cxd omega) {
  cxd o0e = omega * std::sin(0.5 * eta);
  cxd o1e = omega * std::cos(0.5 * eta) * cxd(std::cos(gamma_drive), std::sin(gamma_drive));
  return {o0e, o1e};
}

BrightDark bright_dark(double eta, double gamma_drive) {
  double s = std::sin(0.5 * eta), c = std::cos(0.5 * eta);
  cxd ph(std::cos(gamma_drive), -std::sin(gamma_drive));  // exp(-i*gamma)
  BrightDark bd;
  bd.bright << s, c * ph;
  bd.dark << c, -s * ph;
  return bd;
}

GateSpec toffoli_spec(int n) {
  if (n < 2) throw std::invalid_argument("toffoli_spec: n must be >= 2");
  GateSpec s = GateSpec::base_protocol(n, M_PI);
  s.eta[n - 1] = 0.5 * M_PI;
  s.gamma[n - 1] = 0.0;
  return s;
}

GateSpec controlled_phase_spec(int n, double theta) {
  if (n < 2) throw std::invalid_argument("controlled_phase_spec: n must be >= 2");
  return GateSpec::base_protocol(n, theta);
}

SingleQubitGate SingleQubitGate::identity() {
  SingleQubitGate g;
  g.u = Eigen::Matrix2cd::Identity();
  return g;
}

SingleQubitGate SingleQubitGate::from_axis_angle(double alpha, const Eigen::Vector3d& axis,
                                                 double theta) {
  if (std::abs(axis.norm() - 1.0) > 1e-10)
    throw std::domain_error("SingleQubitGate: rotation axis must be a unit vector");
  SingleQubitGate g;
  g.alpha = alpha;
  g.axis = axis;
  g.theta = theta;
  const cxd i(0, 1);
  Eigen::Matrix2cd x, y, z;
  x << 0, 1, 1, 0;
  y << 0, -i, i, 0;
  z << 1, 0, 0, -1;
  Eigen::Matrix2cd rs = axis.x() * x + axis.y() * y + axis.z() * z;
  g.u = std::exp(i * alpha) *
        (std::cos(0.5 * theta) * Eigen::Matrix2cd::Identity() - i * std::sin(0.5 * theta) * rs);
  return g;
}

SingleQubitGate SingleQubitGate::from_matrix(const Eigen::Matrix2cd& u) {
  check_unitary(u);
  SingleQubitGate g;
  g.u = u;

  const cxd i(0, 1);
  cxd a = 0.5 * (u(0, 0) + u(1, 1));                    // exp(i*alpha) cos(theta/2)
  cxd bx = 0.5 * i * (u(0, 1) + u(1, 0));               // exp(i*alpha) sin(theta/2) r_x
  cxd by = 0.5 * i * (-i * u(1, 0) + i * u(0, 1));      // tr(sigma_y u) * i/2
  cxd bz = 0.5 * i * (u(0, 0) - u(1, 1));

  // All four share the same phase; read it off the largest one.
  cxd probe = a;
  for (cxd v : {bx, by, bz})
    if (std::abs(v) > std::abs(probe)) probe = v;
  double alpha = std::arg(probe);
  cxd ph(std::cos(-alpha), std::sin(-alpha));
  double c = (a * ph).real();
  Eigen::Vector3d b((bx * ph).real(), (by * ph).real(), (bz * ph).real());
  double s = b.norm();
  if (s < 1e-14) {
    // pure phase gate times identity
    if (c < 0) {
      alpha = wrap_angle(alpha + M_PI);
      c = -c;
    }
    g.alpha = alpha;
    g.axis = Eigen::Vector3d(0, 0, 1);
    g.theta = 0.0;
    return g;
  }
  // Fix the alpha vs alpha+pi ambiguity so that sin(theta/2) >= 0.
  g.theta = 2.0 * std::atan2(s, c);
  g.axis = b / s;
  g.alpha = wrap_angle(alpha);
  return g;
}

SingleQubitGate target_unitary(const GateSpec& spec, int target_index) {
  spec.validate();
  if (target_index < 0 || target_index >= spec.n())
    throw std::out_of_range("target_unitary: bad target index");
  double eta = spec.eta[target_index], gamma = spec.gamma[target_index];
  BrightDark bd = bright_dark(eta, gamma);
  cxd phase = std::exp(cxd(0, spec.theta));
  Eigen::Matrix2cd u = phase * (bd.dark * bd.dark.adjoint()) + bd.bright * bd.bright.adjoint();

  SingleQubitGate g;
  g.u = u;
  g.alpha = 0.5 * spec.theta;
  g.axis = Eigen::Vector3d(std::sin(eta) * std::cos(gamma), -std::sin(eta) * std::sin(gamma),
                           2.0 * std::sin(0.5 * eta) * std::sin(0.5 * eta) - 1.0);
  g.theta = spec.theta;
  return g;
}

RotationPlan controlled_rotation_plan(const Eigen::Vector3d& r_hat, double theta, double alpha,
                                      int n) {
  if (n < 1) throw std::invalid_argument("controlled_rotation_plan: n must be >= 1");
  if (std::abs(r_hat.norm() - 1.0) > 1e-10)
    throw std::domain_error("controlled_rotation_plan: axis must be a unit vector");

  double eta = std::acos(std::clamp(-r_hat.z(), -1.0, 1.0));
  double sin_eta = std::sqrt(std::max(0.0, 1.0 - r_hat.z() * r_hat.z()));
  double gamma = sin_eta > 1e-12 ? std::atan2(-r_hat.y(), r_hat.x()) : 0.0;

  RotationPlan plan;
  plan.spec = GateSpec::base_protocol(n, theta);
  plan.spec.eta[n - 1] = eta;
  plan.spec.gamma[n - 1] = gamma;
  plan.residual_phase = wrap_angle(alpha - 0.5 * theta);
  plan.directly_realizable = std::abs(plan.residual_phase) < kUnitaryTol;
  return plan;
}

std::pair<double, double> dark_state_params(const Eigen::Vector2cd& dark) {
  Eigen::Vector2cd d = dark.normalized();
  double mag0 = std::abs(d(0)), mag1 = std::abs(d(1));
  double eta = 2.0 * std::atan2(mag1, mag0);
  if (mag1 < 1e-14) return {0.0, 0.0};         // dark = |0>
  if (mag0 < 1e-14) {
    // dark proportional to |1>: eta = pi, phase of -exp(-i*gamma) gives gamma
    double gamma = -std::arg(-d(1));
    return {M_PI, wrap_angle(gamma)};
  }
  cxd gauge = d(0) / mag0;
  cxd b = d(1) / gauge;                        // now -sin(eta/2) exp(-i*gamma)
  double gamma = -std::arg(-b);
  return {eta, wrap_angle(gamma)};
}

GateSpec absorb_single_qubit_gates(const std::vector<SingleQubitGate>& pre_gates,
                                   const GateSpec& spec) {
  spec.validate();
  if (static_cast<int>(pre_gates.size()) != spec.n())
    throw std::invalid_argument("absorb_single_qubit_gates: need one gate per qubit");
  GateSpec out = spec;
  for (int q = 0; q < spec.n(); ++q) {
    check_unitary(pre_gates[q].u);
    Eigen::Vector2cd dark = bright_dark(spec.eta[q], spec.gamma[q]).dark;
    Eigen::Vector2cd rotated = pre_gates[q].u.adjoint() * dark;  // A^{-1} |D>
    auto [eta, gamma] = dark_state_params(rotated);
    out.eta[q] = eta;
    out.gamma[q] = gamma;
  }
  return out;
}

Eigen::VectorXcd dark_product_state(const GateSpec& spec) {
  spec.validate();
  const int n = spec.n();
  const std::size_t dim = std::size_t(1) << n;
  std::vector<Eigen::Vector2cd> dark(n);
  for (int q = 0; q < n; ++q) dark[q] = bright_dark(spec.eta[q], spec.gamma[q]).dark;

  Eigen::VectorXcd v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    cxd c(1, 0);
    for (int q = 0; q < n; ++q) {
      int bit = static_cast<int>((i >> (n - 1 - q)) & 1u);
      c *= dark[q](bit);
    }
    v(static_cast<Eigen::Index>(i)) = c;
  }
  return v;
}

Eigen::MatrixXcd ideal_matrix(const GateSpec& spec) {
  Eigen::VectorXcd d = dark_product_state(spec);
  const auto dim = d.size();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  u += (std::exp(cxd(0, spec.theta)) - 1.0) * (d * d.adjoint());
  return u;
}

}  // namespace sechyp
