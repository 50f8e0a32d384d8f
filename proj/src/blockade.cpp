#include "sechyp/blockade.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "sechyp/errors.hpp"

namespace sechyp {

BlockadeChain build_chain(int n0, const Eigen::MatrixXd& shifts) {
  if (n0 < 2) throw std::domain_error("build_chain: no doubly excited states for n0 < 2");
  if (shifts.rows() < n0 || shifts.cols() < n0)
    throw std::invalid_argument("build_chain: shift matrix smaller than n0");

  const std::size_t n_ee = static_cast<std::size_t>(n0) * (n0 - 1) / 2;
  Eigen::VectorXd pair_shift(n_ee);
  {
    std::size_t i = 0;
    for (int q = 0; q < n0; ++q)
      for (int p = q + 1; p < n0; ++p) pair_shift(i++) = shifts(q, p);
  }
  const double breakdown = 1e-12 * pair_shift.cwiseAbs().maxCoeff();

  BlockadeChain chain;
  chain.n0 = n0;
  chain.n_ee = n_ee;
  chain.d.push_back(Eigen::VectorXd::Constant(n_ee, 1.0 / std::sqrt(double(n_ee))));
  chain.delta.push_back(chain.d[0].cwiseProduct(pair_shift).dot(chain.d[0]));

  for (std::size_t k = 1; k < n_ee; ++k) {
    // Residual of the pair-shift map applied to d^(k), orthogonalized against the
    // whole chain so far (two passes keep orthonormality at round-off level).
    Eigen::VectorXd r = chain.d[k - 1].cwiseProduct(pair_shift);
    for (const auto& prev : chain.d) r -= prev.dot(r) * prev;
    for (const auto& prev : chain.d) r -= prev.dot(r) * prev;
    double rn = r.norm();
    if (rn <= breakdown) break;  // chain exhausted (e.g. equal shifts)
    r /= rn;

    double omega_k = 2.0 * r.cwiseProduct(pair_shift).dot(chain.d[k - 1]);
    chain.d.push_back(r);
    chain.delta.push_back(r.cwiseProduct(pair_shift).dot(r));
    chain.coupling.push_back(omega_k);
  }
  chain.K = static_cast<int>(chain.d.size());
  return chain;
}

double effective_shift(const BlockadeChain& chain) {
  if (chain.K < 1) throw std::invalid_argument("effective_shift: empty chain");
  double eff = chain.delta[chain.K - 1];
  for (int k = chain.K - 2; k >= 0; --k) {
    if (eff == 0.0)
      throw SingularRecursionError("effective_shift: zero intermediate effective shift");
    eff = chain.delta[k] - chain.coupling[k] * chain.coupling[k] / (4.0 * eff);
  }
  return eff;
}

void BlockadeChain::dump_csv(std::ostream& os) const {
  os << "k,delta_omega_k,omega_k\n";
  for (int k = 0; k < K; ++k) {
    os << (k + 1) << ',' << delta[k] << ',' << (k > 0 ? coupling[k - 1] : 0.0) << '\n';
  }
}

}  // namespace sechyp
