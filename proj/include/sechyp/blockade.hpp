#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace sechyp {

/// Symmetrized doubly-excited chain for a set of n0 driven qubits. The diagonal
/// pair-shift operator is tridiagonalized starting from the uniform vector
/// d^(1) = (1,...,1)/sqrt(n_ee) over pair index (q,p), q < p in row-major order;
/// delta[k] and coupling[k] are the diagonal and off-diagonal of the resulting
/// three-term chain.
struct BlockadeChain {
  int n0 = 0;
  std::size_t n_ee = 0;              // n0*(n0-1)/2
  std::vector<Eigen::VectorXd> d;    // K orthonormal vectors over pair space
  std::vector<double> delta;         // delta[k-1] = Delta_omega^(k), k = 1..K
  std::vector<double> coupling;      // coupling[k-2] = Omega^(k), k = 2..K
  int K = 0;

  void dump_csv(std::ostream& os) const;
};

/// Builds the chain from the shift matrix restricted to the n0 driven qubits
/// (an n0 x n0 symmetric matrix). Iteration stops when the re-orthogonalized
/// residual norm drops below 1e-12 * max|shift| (breakdown, e.g. equal shifts).
/// Throws std::domain_error for n0 < 2.
BlockadeChain build_chain(int n0, const Eigen::MatrixXd& shifts);

/// Effective blockade shift of the uniform doubly-excited state via the backward
/// recursion eff^(K) = delta^(K), eff^(k) = delta^(k) - coupling^(k+1)^2 / (4 eff^(k+1)).
/// Throws SingularRecursionError when an intermediate eff vanishes.
double effective_shift(const BlockadeChain& chain);

}  // namespace sechyp
