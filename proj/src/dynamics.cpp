#include "sechyp/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "sechyp/binomial.hpp"
#include "sechyp/parallel.hpp"

namespace sechyp {

namespace {

constexpr cxd kMinusI(0.0, -1.0);

cxd cis(double phi) { return {std::cos(phi), std::sin(phi)}; }

void require_pure(const QuantumState& s, const char* who) {
  if (s.kind != StateKind::Pure) throw std::invalid_argument(std::string(who) + ": expected a pure state");
  double n2 = s.vec.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(who) + ": state not normalized");
}

// Raw final ground amplitude of the driven two-level system (no theta factor).
cxd two_level_ground_amplitude(const SechypParams& p, double scale, double theta,
                               const IntegratorOptions& opts) {
  p.validate();
  if (!(scale >= 0.0)) throw std::invalid_argument("two_level_transfer: scale must be >= 0");

  Eigen::VectorXcd y(2);
  y << 1.0, 0.0;
  auto run_pulse = [&](const SechypParams& pulse) {
    auto rhs = [&pulse, scale](double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& dv) {
      cxd half = 0.5 * scale * envelope(pulse, t);
      dv[0] = kMinusI * (std::conj(half) * v[1]);
      dv[1] = kMinusI * (half * v[0]);
    };
    y = integrate(rhs, std::move(y), 0.0, pulse.t_cutoff, opts);
  };
  run_pulse(p);
  run_pulse(second_pulse(p, theta));
  return y[0];
}

}  // namespace

QuantumState QuantumState::basis_state(std::shared_ptr<const Basis> basis, std::uint64_t code) {
  QuantumState s;
  s.kind = StateKind::Pure;
  s.basis = std::move(basis);
  s.vec = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.basis->size()));
  s.vec[static_cast<Eigen::Index>(s.basis->index_of(code))] = 1.0;
  return s;
}

QuantumState QuantumState::uniform_superposition(std::shared_ptr<const Basis> basis) {
  QuantumState s;
  s.kind = StateKind::Pure;
  s.basis = std::move(basis);
  const int n = s.basis->n();
  s.vec = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.basis->size()));
  const double amp = std::pow(2.0, -0.5 * n);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits)
    s.vec[static_cast<Eigen::Index>(s.basis->index_of(s.basis->ground_code(bits)))] = amp;
  return s;
}

QuantumState QuantumState::ghz(std::shared_ptr<const Basis> basis) {
  QuantumState s;
  s.kind = StateKind::Pure;
  s.basis = std::move(basis);
  const int n = s.basis->n();
  s.vec = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.basis->size()));
  const double amp = 1.0 / std::sqrt(2.0);
  s.vec[static_cast<Eigen::Index>(s.basis->index_of(s.basis->ground_code(0)))] = amp;
  s.vec[static_cast<Eigen::Index>(
      s.basis->index_of(s.basis->ground_code((1u << n) - 1)))] = amp;
  return s;
}

QuantumState QuantumState::to_density() const {
  if (kind == StateKind::Density) return *this;
  QuantumState d;
  d.kind = StateKind::Density;
  d.basis = basis;
  d.mat = vec * vec.adjoint();
  return d;
}

double QuantumState::norm() const {
  return kind == StateKind::Pure ? vec.norm() : mat.trace().real();
}

void QuantumState::dump_csv(std::ostream& os) const {
  os << "label,re,im\n";
  if (kind == StateKind::Pure) {
    for (std::size_t i = 0; i < basis->size(); ++i)
      os << basis->label(i) << ',' << vec[static_cast<Eigen::Index>(i)].real() << ','
         << vec[static_cast<Eigen::Index>(i)].imag() << '\n';
  } else {
    for (std::size_t i = 0; i < basis->size(); ++i)
      os << basis->label(i) << ',' << mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real()
         << ',' << 0.0 << '\n';
  }
}

std::shared_ptr<const Basis> make_register_basis(const RegisterConfig& cfg) {
  cfg.validate();
  return make_basis(cfg.n, cfg.all_shifts_infinite() ? 1 : 2);
}

cxd two_level_transfer(const SechypParams& p, double scale, double theta,
                       const IntegratorOptions& opts) {
  return two_level_ground_amplitude(p, scale, theta, opts) * cis(theta);
}

ReducedLadderState evolve_reduced(int n0, const SechypParams& p, double delta_omega,
                                  double theta, const IntegratorOptions& opts) {
  if (n0 < 1) throw std::invalid_argument("evolve_reduced: n0 must be >= 1");
  p.validate();
  const bool drop_bee = std::isinf(delta_omega) || n0 == 1;
  const double g_psi = std::sqrt(double(n0));
  const double g_ee = std::sqrt(2.0 * (n0 - 1));

  Eigen::VectorXcd y(drop_bee ? 2 : 3);
  y.setZero();
  y[0] = 1.0;

  auto run_pulse = [&](const SechypParams& pulse) {
    if (drop_bee) {
      auto rhs = [&](double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& dv) {
        cxd half = 0.5 * envelope(pulse, t);
        dv[0] = kMinusI * (g_psi * std::conj(half) * v[1]);
        dv[1] = kMinusI * (g_psi * half * v[0]);
      };
      y = integrate(rhs, std::move(y), 0.0, pulse.t_cutoff, opts);
    } else {
      auto rhs = [&](double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& dv) {
        cxd half = 0.5 * envelope(pulse, t);
        cxd halfc = std::conj(half);
        dv[0] = kMinusI * (g_psi * halfc * v[1]);
        dv[1] = kMinusI * (g_psi * half * v[0] + g_ee * halfc * v[2]);
        dv[2] = kMinusI * (g_ee * half * v[1] + delta_omega * v[2]);
      };
      y = integrate(rhs, std::move(y), 0.0, pulse.t_cutoff, opts);
    }
  };
  run_pulse(p);
  run_pulse(second_pulse(p, theta));

  ReducedLadderState out;
  out.psi = y[0];
  out.b_e = y[1];
  out.b_ee = drop_bee ? cxd(0, 0) : y[2];
  out.n0 = n0;
  return out;
}

Hamiltonian::Hamiltonian(const RegisterConfig& cfg, const GateSpec& spec,
                         std::shared_ptr<const Basis> basis)
    : basis_(std::move(basis)) {
  cfg.validate();
  spec.validate();
  if (spec.n() != cfg.n || basis_->n() != cfg.n)
    throw std::invalid_argument("Hamiltonian: qubit count mismatch");

  const bool all_inf = cfg.all_shifts_infinite();
  if (basis_->truncation() < 2 && !all_inf)
    throw std::invalid_argument(
        "Hamiltonian: finite blockade shifts need a two-excitation basis "
        "(shift term unrepresentable at truncation 1)");
  if (basis_->truncation() >= 2 && all_inf)
    throw std::invalid_argument(
        "Hamiltonian: infinite shifts with a two-excitation basis; use truncation 1");

  const int n = cfg.n;
  const auto dim = static_cast<Eigen::Index>(basis_->size());

  std::vector<Eigen::Triplet<cxd>> trip;
  for (std::size_t i = 0; i < basis_->size(); ++i) {
    std::uint64_t code = basis_->code(i);
    for (int q = 0; q < n; ++q) {
      int s = basis_->qubit_state(code, q);
      if (s == Basis::kExcited) continue;
      std::uint64_t up = basis_->with_qubit_state(code, q, Basis::kExcited);
      if (!basis_->contains(up)) continue;  // beyond truncation
      cxd coeff;
      if (s == Basis::kGround0)
        coeff = 0.5 * std::sin(0.5 * spec.eta[q]);
      else
        coeff = 0.5 * std::cos(0.5 * spec.eta[q]) * cis(spec.gamma[q]);
      if (coeff != cxd(0, 0))
        trip.emplace_back(static_cast<int>(basis_->index_of(up)), static_cast<int>(i), coeff);
    }
  }
  raise_.resize(dim, dim);
  raise_.setFromTriplets(trip.begin(), trip.end());
  raise_.makeCompressed();
  lower_ = raise_.adjoint();

  shift_diag_ = Eigen::VectorXd::Zero(dim);
  if (!all_inf) {
    for (int q = 0; q < n; ++q)
      for (int p = q + 1; p < n; ++p)
        if (!std::isfinite(cfg.shifts(q, p)))
          throw std::invalid_argument("Hamiltonian: mixed finite/infinite shifts unsupported");
    for (std::size_t i = 0; i < basis_->size(); ++i) {
      std::uint32_t m = basis_->excited_mask(i);
      if (std::popcount(m) < 2) continue;
      double d = 0.0;
      for (int q = 0; q < n; ++q)
        if (m & (1u << q))
          for (int p = q + 1; p < n; ++p)
            if (m & (1u << p)) d += cfg.shifts(q, p);
      shift_diag_[static_cast<Eigen::Index>(i)] = d;
    }
  }
}

void Hamiltonian::apply(cxd omega, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
  out.noalias() = omega * (raise_ * psi);
  out.noalias() += std::conj(omega) * (lower_ * psi);
  out.array() += shift_diag_.array() * psi.array();
}

namespace {

Eigen::VectorXcd integrate_schrodinger(const Hamiltonian& h, const DriveProfile& drive,
                                       double duration, Eigen::VectorXcd y0,
                                       const IntegratorOptions& opts) {
  Eigen::VectorXcd scratch(y0.size());
  auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    h.apply(drive(t), y, dy);
    dy *= kMinusI;
  };
  return integrate(rhs, std::move(y0), 0.0, duration, opts);
}

}  // namespace

QuantumState evolve_schrodinger_drive(const RegisterConfig& cfg, const GateSpec& spec,
                                      const DriveProfile& drive, double duration,
                                      const QuantumState& psi0, const IntegratorOptions& opts) {
  require_pure(psi0, "evolve_schrodinger");
  Hamiltonian h(cfg, spec, psi0.basis);
  QuantumState out = psi0;
  out.vec = integrate_schrodinger(h, drive, duration, std::move(out.vec), opts);
  if (std::abs(out.vec.squaredNorm() - 1.0) > 1e-6)
    throw NumericalError("evolve_schrodinger: norm drifted beyond 1e-6", duration);
  return out;
}

QuantumState evolve_schrodinger(const RegisterConfig& cfg, const GateSpec& spec,
                                const SechypParams& p, const QuantumState& psi0,
                                const IntegratorOptions& opts) {
  require_pure(psi0, "evolve_schrodinger");
  p.validate();
  Hamiltonian h(cfg, spec, psi0.basis);
  SechypParams p2 = second_pulse(p, spec.theta);
  QuantumState out = psi0;
  out.vec = integrate_schrodinger(
      h, [&p](double t) { return envelope(p, t); }, p.t_cutoff, std::move(out.vec), opts);
  out.vec = integrate_schrodinger(
      h, [&p2](double t) { return envelope(p2, t); }, p2.t_cutoff, std::move(out.vec), opts);
  if (std::abs(out.vec.squaredNorm() - 1.0) > 1e-6)
    throw NumericalError("evolve_schrodinger: norm drifted beyond 1e-6", 2 * p.t_cutoff);
  return out;
}

namespace {

// Lindblad right-hand side. The pure-dephasing operators are diagonal, so the
// dissipator reduces to an elementwise decay of coherences at rate d/T2 where d
// counts the qubits whose excited/ground status differs between bra and ket.
// -i[H,rho] is assembled from M = H*rho alone using hermiticity of rho, which
// keeps every stage exactly Hermitian.
struct LindbladRhs {
  const Hamiltonian& h;
  const DriveProfile& drive;
  const std::vector<std::uint32_t>& masks;
  double inv_t2;
  Eigen::MatrixXcd m;  // scratch: H*rho

  void operator()(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    const auto dim = static_cast<Eigen::Index>(masks.size());
    Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), dim, dim);
    Eigen::Map<Eigen::MatrixXcd> out(dy.data(), dim, dim);

    cxd omega = drive(t);
    m.noalias() = omega * (h.raising() * rho);
    m.noalias() += std::conj(omega) * (h.lowering() * rho);
    const Eigen::VectorXd& d = h.shift_diagonal();
    for (Eigen::Index j = 0; j < dim; ++j) {
      const std::uint32_t mj = masks[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i <= j; ++i) {
        const std::uint32_t mi = masks[static_cast<std::size_t>(i)];
        double rate = inv_t2 * std::popcount(mi ^ mj);
        cxd hij = m(i, j) + d[i] * rho(i, j);
        cxd hji = m(j, i) + d[j] * rho(j, i);
        cxd val = kMinusI * (hij - std::conj(hji)) - rate * rho(i, j);
        out(i, j) = val;
        out(j, i) = std::conj(val);
      }
    }
  }
};

}  // namespace

QuantumState evolve_lindblad_drive(const RegisterConfig& cfg, const GateSpec& spec,
                                   const DriveProfile& drive, double duration,
                                   const QuantumState& rho0, const IntegratorOptions& opts) {
  if (rho0.kind != StateKind::Density)
    throw std::invalid_argument("evolve_lindblad: expected a density matrix");
  if (!std::isfinite(cfg.t2)) throw std::invalid_argument("evolve_lindblad: t2 must be finite");

  const auto dim = rho0.mat.rows();
  if (rho0.mat.cols() != dim || static_cast<std::size_t>(dim) != rho0.basis->size())
    throw std::invalid_argument("evolve_lindblad: density matrix shape mismatch");
  if ((rho0.mat - rho0.mat.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("evolve_lindblad: rho0 not Hermitian");
  if (std::abs(rho0.mat.trace().real() - 1.0) > 1e-6)
    throw std::invalid_argument("evolve_lindblad: rho0 trace != 1");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0.mat, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw std::invalid_argument("evolve_lindblad: rho0 not positive semidefinite");
  }

  Hamiltonian h(cfg, spec, rho0.basis);
  std::vector<std::uint32_t> masks(rho0.basis->size());
  for (std::size_t i = 0; i < masks.size(); ++i) masks[i] = rho0.basis->excited_mask(i);

  // Symmetrize once so the elementwise-Hermitian RHS sees an exactly Hermitian input.
  Eigen::MatrixXcd r0 = 0.5 * (rho0.mat + rho0.mat.adjoint());
  Eigen::VectorXcd y0 = Eigen::Map<const Eigen::VectorXcd>(r0.data(), dim * dim);

  LindbladRhs rhs{h, drive, masks, 1.0 / cfg.t2, Eigen::MatrixXcd(dim, dim)};
  Eigen::VectorXcd yf = integrate(rhs, std::move(y0), 0.0, duration, opts);

  QuantumState out = rho0;
  out.mat = Eigen::Map<const Eigen::MatrixXcd>(yf.data(), dim, dim);
  if (std::abs(out.mat.trace().real() - 1.0) > 1e-6)
    throw NumericalError("evolve_lindblad: trace drifted beyond 1e-6", duration);
  return out;
}

QuantumState evolve_lindblad(const RegisterConfig& cfg, const GateSpec& spec,
                             const SechypParams& p, const QuantumState& rho0,
                             const IntegratorOptions& opts) {
  p.validate();
  SechypParams p2 = second_pulse(p, spec.theta);
  QuantumState mid = evolve_lindblad_drive(
      cfg, spec, [&p](double t) { return envelope(p, t); }, p.t_cutoff, rho0, opts);
  return evolve_lindblad_drive(
      cfg, spec, [&p2](double t) { return envelope(p2, t); }, p2.t_cutoff, mid, opts);
}

double gate_error(const QuantumState& final_state, const QuantumState& psi0,
                  const GateSpec& spec) {
  require_pure(psi0, "gate_error(psi0)");
  if (!final_state.basis || !psi0.basis || final_state.basis->n() != psi0.basis->n() ||
      final_state.basis->size() != psi0.basis->size())
    throw std::invalid_argument("gate_error: mismatched bases");
  spec.validate();
  if (spec.n() != psi0.basis->n()) throw std::invalid_argument("gate_error: spec size mismatch");

  // target = psi0 + (e^{i theta} - 1) <D|psi0> |D>, dark product over ground states
  const int n = psi0.basis->n();
  Eigen::VectorXcd dark_coeff = dark_product_state(spec);
  Eigen::VectorXcd dvec = Eigen::VectorXcd::Zero(psi0.vec.size());
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    // dark_product_state orders by qubit-0-most-significant computational index
    std::uint32_t msb_index = 0;
    for (int q = 0; q < n; ++q)
      if (bits & (1u << q)) msb_index |= 1u << (n - 1 - q);
    dvec[static_cast<Eigen::Index>(psi0.basis->index_of(psi0.basis->ground_code(bits)))] =
        dark_coeff[msb_index];
  }
  cxd overlap = dvec.dot(psi0.vec);  // <D|psi0>
  Eigen::VectorXcd target = psi0.vec + (cis(spec.theta) - 1.0) * overlap * dvec;

  double eps;
  if (final_state.kind == StateKind::Pure) {
    eps = 1.0 - std::norm(target.dot(final_state.vec));
  } else {
    eps = 1.0 - (target.adjoint() * final_state.mat * target)(0, 0).real();
  }
  return std::clamp(eps, 0.0, 1.0);
}

cxd pattern_ground_amplitude(const std::vector<int>& zero_qubits, const Eigen::MatrixXd& shifts,
                             const SechypParams& p, double theta, const IntegratorOptions& opts) {
  const int m = static_cast<int>(zero_qubits.size());
  if (m == 0) return {1.0, 0.0};
  if (m == 1) return two_level_ground_amplitude(p, 1.0, theta, opts);
  p.validate();

  const int n_pairs = m * (m - 1) / 2;
  Eigen::VectorXd pair_shift(n_pairs);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n_pairs);
  {
    int i = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        pairs.emplace_back(a, b);
        pair_shift[i++] = shifts(zero_qubits[a], zero_qubits[b]);
      }
  }

  const int dim = 1 + m + n_pairs;
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim);
  y[0] = 1.0;

  auto run_pulse = [&](const SechypParams& pulse) {
    auto rhs = [&](double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& dv) {
      const cxd half = 0.5 * envelope(pulse, t);
      const cxd halfc = std::conj(half);
      cxd sum_singles(0, 0);
      for (int a = 0; a < m; ++a) sum_singles += v[1 + a];
      dv[0] = kMinusI * (halfc * sum_singles);
      for (int a = 0; a < m; ++a) dv[1 + a] = half * v[0];
      const cxd* pv = v.data() + 1 + m;
      cxd* pd = dv.data() + 1 + m;
      for (int i = 0; i < n_pairs; ++i) {
        auto [a, b] = pairs[static_cast<std::size_t>(i)];
        cxd cp = pv[i];
        pd[i] = kMinusI * (half * (v[1 + a] + v[1 + b]) + pair_shift[i] * cp);
        dv[1 + a] += halfc * cp;
        dv[1 + b] += halfc * cp;
      }
      for (int a = 0; a < m; ++a) dv[1 + a] *= kMinusI;
    };
    y = integrate(rhs, std::move(y), 0.0, pulse.t_cutoff, opts);
  };
  run_pulse(p);
  run_pulse(second_pulse(p, theta));
  return y[0];
}

double uniform_error_blockwise(const Eigen::MatrixXd& shifts, const SechypParams& p,
                               double theta, const IntegratorOptions& opts, int jobs) {
  const int n = static_cast<int>(shifts.rows());
  if (n < 1 || n > 24) throw std::invalid_argument("uniform_error_blockwise: n out of range");
  const std::size_t count = std::size_t(1) << n;

  const cxd single = two_level_ground_amplitude(p, 1.0, theta, opts);
  std::vector<cxd> amp(count);
  parallel_for(count, jobs, [&](std::size_t bits) {
    int n0 = std::popcount(static_cast<std::uint32_t>(bits));
    if (n0 == 0) {
      amp[bits] = 1.0;
    } else if (n0 == 1) {
      amp[bits] = single;
    } else {
      std::vector<int> zq;
      zq.reserve(static_cast<std::size_t>(n0));
      for (int q = 0; q < n; ++q)
        if (bits & (std::size_t(1) << q)) zq.push_back(q);
      amp[bits] = pattern_ground_amplitude(zq, shifts, p, theta, opts);
    }
  });

  // <target|final> = 2^-n (e^{-i theta} + sum over driven patterns)
  cxd acc(0, 0);
  for (std::size_t bits = 1; bits < count; ++bits) acc += amp[bits];
  cxd overlap = (acc + cis(-theta)) / std::pow(2.0, n);
  return std::clamp(1.0 - std::norm(overlap), 0.0, 1.0);
}

std::vector<cxd> reduced_ground_amplitudes(int n_max, const SechypParams& p,
                                           double delta_omega, double theta,
                                           const IntegratorOptions& opts, int jobs) {
  std::vector<cxd> amps(static_cast<std::size_t>(n_max));
  parallel_for(static_cast<std::size_t>(n_max), jobs, [&](std::size_t i) {
    amps[i] = evolve_reduced(static_cast<int>(i) + 1, p, delta_omega, theta, opts).psi;
  });
  return amps;
}

double uniform_error_from_amplitudes(int n, std::span<const cxd> amplitudes, double theta) {
  if (static_cast<int>(amplitudes.size()) < n)
    throw std::invalid_argument("uniform_error_from_amplitudes: need amplitudes up to n0 = n");
  BinomialCache binom(n);
  cxd acc = cis(-theta);
  for (int n0 = 1; n0 <= n; ++n0)
    acc += binom(n, n0) * amplitudes[static_cast<std::size_t>(n0 - 1)];
  double overlap2 = std::norm(acc) * std::pow(2.0, -2.0 * n);
  return std::clamp(1.0 - overlap2, 0.0, 1.0);
}

}  // namespace sechyp
