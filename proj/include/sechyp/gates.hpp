#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace sechyp {

using cxd = std::complex<double>;

/// Per-qubit bright/dark drive parameters plus the conditional phase theta.
/// The operation applies exp(i*theta) to |D_1 D_2 ... D_n> where
///   |D_q> = cos(eta_q/2)|0> - sin(eta_q/2) exp(-i*gamma_q)|1>.
/// gamma here is the drive's relative phase, unrelated to the dephasing exponent.
struct GateSpec {
  std::vector<double> eta;
  std::vector<double> gamma;
  double theta = 0.0;

  int n() const { return static_cast<int>(eta.size()); }
  void validate() const;

  /// The base protocol of the two-pulse scheme: every qubit driven on 0<->e only
  /// (eta = pi), phase theta on |11...1>.
  static GateSpec base_protocol(int n, double theta);
};

struct BrightDark {
  Eigen::Vector2cd bright;
  Eigen::Vector2cd dark;
};

/// Fields on the two optical transitions for one qubit:
/// (Omega_0e, Omega_1e) = (Omega*sin(eta/2), Omega*cos(eta/2)*exp(i*gamma)).
std::pair<cxd, cxd> drive_fields(double eta, double gamma_drive, cxd omega);

/// Ground-state superpositions coupled with full strength (bright) and not at
/// all (dark) by the two-frequency drive.
BrightDark bright_dark(double eta, double gamma_drive);

/// n-bit Toffoli: controls eta = pi, target (last qubit) eta = pi/2, gamma = 0,
/// theta = pi. The target dark state is |->, which makes the assembled operation
/// exactly CCX..X up to a global phase.
GateSpec toffoli_spec(int n);

/// C^{n-1}-P(theta): all eta = pi; theta = pi, pi/2, pi/4 give Z, S, T.
GateSpec controlled_phase_spec(int n, double theta);

/// 2x2 unitary with its axis-angle form U = exp(i*alpha) R_axis(theta).
struct SingleQubitGate {
  Eigen::Matrix2cd u;
  double alpha = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d(0, 0, 1);
  double theta = 0.0;

  static SingleQubitGate from_matrix(const Eigen::Matrix2cd& u);  // throws if non-unitary
  static SingleQubitGate from_axis_angle(double alpha, const Eigen::Vector3d& axis,
                                         double theta);
  static SingleQubitGate identity();
};

/// Operation seen by the target qubit when all controls sit in their dark states:
/// U' = exp(i*theta)|D><D| + |B><B| = exp(i*theta/2) R_axis(theta) with
/// axis = (sin(eta)cos(gamma), -sin(eta)sin(gamma), -cos(eta)).
SingleQubitGate target_unitary(const GateSpec& spec, int target_index);

struct RotationPlan {
  GateSpec spec;
  double residual_phase;      // alpha' = alpha - theta/2, wrapped to (-pi, pi]
  bool directly_realizable;   // alpha' == 0 (mod 2pi)
};

/// Inverts the axis-angle map to target (eta, gamma); controls get eta = pi.
/// Realizes C^{n-1}[exp(i*alpha) R_r(theta)] up to the residual phase alpha',
/// which, when nonzero, needs a second operation on the controls alone.
RotationPlan controlled_rotation_plan(const Eigen::Vector3d& r_hat, double theta,
                                      double alpha, int n);

/// Absorbs a layer of single-qubit gates preceding the operation by replacing
/// each dark state with A_q^{-1}|D_q>, re-expressed in (eta, gamma) form.
GateSpec absorb_single_qubit_gates(const std::vector<SingleQubitGate>& pre_gates,
                                   const GateSpec& spec);

/// (eta, gamma) of a dark state given as a 2-vector, with the gauge fixed by
/// making the |0> coefficient real and nonnegative.
std::pair<double, double> dark_state_params(const Eigen::Vector2cd& dark);

/// Coefficients of |D_1 D_2 ... D_n> over the 2^n computational states
/// (qubit 0 = most significant bit).
Eigen::VectorXcd dark_product_state(const GateSpec& spec);

/// The ideal 2^n x 2^n unitary: identity plus (exp(i*theta)-1) on the dark product.
Eigen::MatrixXcd ideal_matrix(const GateSpec& spec);

}  // namespace sechyp
