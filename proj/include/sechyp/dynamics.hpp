#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "sechyp/basis.hpp"
#include "sechyp/gates.hpp"
#include "sechyp/integrator.hpp"
#include "sechyp/pulse.hpp"
#include "sechyp/qregister.hpp"

namespace sechyp {

enum class StateKind { Pure, Density };

/// Pure state vector or density matrix over a truncated register basis.
struct QuantumState {
  StateKind kind = StateKind::Pure;
  std::shared_ptr<const Basis> basis;
  Eigen::VectorXcd vec;  // pure amplitudes (basis order)
  Eigen::MatrixXcd mat;  // density matrix

  static QuantumState basis_state(std::shared_ptr<const Basis> basis, std::uint64_t code);
  /// Even superposition of all 2^n computational ground states.
  static QuantumState uniform_superposition(std::shared_ptr<const Basis> basis);
  /// (|00...0> + |11...1>)/sqrt(2).
  static QuantumState ghz(std::shared_ptr<const Basis> basis);

  QuantumState to_density() const;
  double norm() const;  // ||psi|| for pure, Re tr(rho) for density
  void dump_csv(std::ostream& os) const;
};

/// Truncation rule: one excitation when all shifts are infinite (no AC physics),
/// two when shifts are finite.
std::shared_ptr<const Basis> make_register_basis(const RegisterConfig& cfg);

using DriveProfile = std::function<cxd(double)>;

/// Complex ground-state return amplitude (times exp(i*theta)) of a two-level
/// system driven at scale*Omega(t) through the excite/deexcite pulse pair.
/// This is the transfer factor T; transfer error = 1 - |T|^2.
cxd two_level_transfer(const SechypParams& p, double scale, double theta,
                       const IntegratorOptions& opts = {});

struct ReducedLadderState {
  cxd psi;   // amplitude on the computational state |Psi(n0)>
  cxd b_e;   // singly excited symmetric state
  cxd b_ee;  // doubly excited symmetric state (0 when delta_omega = inf)
  int n0;
};

/// Three-level symmetric ladder |Psi(n0)> -- |B_e> -- |B_ee> with couplings
/// sqrt(n0)*Omega/2 and sqrt(2(n0-1))*Omega/2 and diagonal delta_omega on B_ee,
/// evolved through both pulses. delta_omega may be +inf (drops the B_ee level).
ReducedLadderState evolve_reduced(int n0, const SechypParams& p, double delta_omega,
                                  double theta, const IntegratorOptions& opts = {});

/// H(t) = sum_q [O0e_q(t)/2 |e><0|_q + O1e_q(t)/2 |e><1|_q + h.c.]
///        + sum_{q<p} shift_qp P(q,p both excited),
/// applied matrix-free. The drive enters through a single complex factor:
/// H(omega) = omega * R + conj(omega) * R^dag + diag(shifts) where R collects the
/// per-qubit raising terms of Eq-style drive_fields with unit Omega.
class Hamiltonian {
 public:
  Hamiltonian(const RegisterConfig& cfg, const GateSpec& spec,
              std::shared_ptr<const Basis> basis);

  void apply(cxd omega, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;
  const std::shared_ptr<const Basis>& basis() const { return basis_; }
  const Eigen::SparseMatrix<cxd>& raising() const { return raise_; }
  const Eigen::SparseMatrix<cxd>& lowering() const { return lower_; }
  const Eigen::VectorXd& shift_diagonal() const { return shift_diag_; }

 private:
  std::shared_ptr<const Basis> basis_;
  Eigen::SparseMatrix<cxd> raise_, lower_;
  Eigen::VectorXd shift_diag_;
};

/// Schroedinger evolution of a pure state through both pulses; theta is taken
/// from spec.theta (it sets the second pulse's phase).
QuantumState evolve_schrodinger(const RegisterConfig& cfg, const GateSpec& spec,
                                const SechypParams& p, const QuantumState& psi0,
                                const IntegratorOptions& opts = {});

/// Same dynamics under an arbitrary drive profile on [0, duration].
QuantumState evolve_schrodinger_drive(const RegisterConfig& cfg, const GateSpec& spec,
                                      const DriveProfile& drive, double duration,
                                      const QuantumState& psi0,
                                      const IntegratorOptions& opts = {});

/// Lindblad evolution with per-qubit pure-dephasing operators
/// C = (|e><e| - |0><0| - |1><1|) / sqrt(2 T2), both pulses. Requires finite t2.
QuantumState evolve_lindblad(const RegisterConfig& cfg, const GateSpec& spec,
                             const SechypParams& p, const QuantumState& rho0,
                             const IntegratorOptions& opts = {});

QuantumState evolve_lindblad_drive(const RegisterConfig& cfg, const GateSpec& spec,
                                   const DriveProfile& drive, double duration,
                                   const QuantumState& rho0,
                                   const IntegratorOptions& opts = {});

/// 1 - <target|rho_f|target> where target is psi0 with exp(i*spec.theta) on its
/// dark-product component. Pure final states discount a global phase.
double gate_error(const QuantumState& final_state, const QuantumState& psi0,
                  const GateSpec& spec);

/// Fast path for the base protocol (eta = pi): the computational pattern with
/// the listed qubits in |0> evolves inside its own block spanned by the pattern,
/// its single excitations, and its pair excitations. Returns the final amplitude
/// on the pattern state after both pulses (no exp(i*theta) bookkeeping).
cxd pattern_ground_amplitude(const std::vector<int>& zero_qubits,
                             const Eigen::MatrixXd& shifts, const SechypParams& p,
                             double theta, const IntegratorOptions& opts = {});

/// Base-protocol gate error on the uniform superposition via 2^n pattern blocks.
/// Exact for eta = pi; used for registers too large for the full basis.
double uniform_error_blockwise(const Eigen::MatrixXd& shifts, const SechypParams& p,
                               double theta, const IntegratorOptions& opts, int jobs);

/// Final |Psi(n0)> amplitudes of the reduced ladder for n0 = 1..n_max (uniform shift).
std::vector<cxd> reduced_ground_amplitudes(int n_max, const SechypParams& p,
                                           double delta_omega, double theta,
                                           const IntegratorOptions& opts, int jobs);

/// Uniform-superposition gate error assembled from per-sector ground amplitudes.
double uniform_error_from_amplitudes(int n, std::span<const cxd> amplitudes, double theta);

}  // namespace sechyp
