#include <doctest.h>

#include <cmath>
#include <random>

#include "sechyp/gates.hpp"

using namespace sechyp;

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool equal_up_to_global_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol) {
  // align phases on the largest entry of a
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(b(r, c)) < 1e-15) return false;
  cxd phase = a(r, c) / b(r, c);
  phase /= std::abs(phase);
  return (a - phase * b).cwiseAbs().maxCoeff() < tol;
}

SingleQubitGate random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = cxd(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
  Eigen::Matrix2cd q = qr.householderQ();
  Eigen::Matrix2cd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= rmat(i, i) / std::abs(rmat(i, i));
  return SingleQubitGate::from_matrix(q);
}

}  // namespace

TEST_CASE("drive_fields splits the Rabi frequency between the two transitions") {
  cxd omega(0.8, 0.3);
  auto [o0, o1] = drive_fields(M_PI, 0.4, omega);
  CHECK(std::abs(o0 - omega) < 1e-14);
  CHECK(std::abs(o1) < 1e-14);

  auto [z0, z1] = drive_fields(0.0, 0.7, omega);
  CHECK(std::abs(z0) < 1e-14);
  CHECK(std::abs(z1 - omega * cxd(std::cos(0.7), std::sin(0.7))) < 1e-14);

  for (double eta : {0.3, 1.2, 2.0}) {
    auto [a, b] = drive_fields(eta, 1.1, omega);
    CHECK(std::norm(a) + std::norm(b) == doctest::Approx(std::norm(omega)).epsilon(1e-13));
  }
}

TEST_CASE("bright/dark states") {
  auto bd = bright_dark(M_PI, 0.9);
  CHECK(std::abs(bd.bright(0) - 1.0) < 1e-14);  // B = |0>
  CHECK(std::abs(bd.dark(0)) < 1e-14);          // D ~ |1>
  CHECK(std::abs(std::abs(bd.dark(1)) - 1.0) < 1e-14);

  auto t = bright_dark(M_PI / 2, M_PI);  // D = (|0> + |1>)/sqrt(2)
  CHECK(std::abs(t.dark(0) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(t.dark(1) - 1.0 / std::sqrt(2.0)) < 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    auto r = bright_dark(u(rng) * M_PI, u(rng) * 2 * M_PI);
    CHECK(std::abs(r.bright.dot(r.dark)) < 1e-14);  // orthogonal
    CHECK(r.bright.norm() == doctest::Approx(1.0));
    CHECK(r.dark.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("toffoli spec reproduces CCX up to a global phase") {
  GateSpec spec = toffoli_spec(3);
  CHECK(spec.theta == doctest::Approx(M_PI));
  CHECK(spec.eta[0] == doctest::Approx(M_PI));
  CHECK(spec.eta[1] == doctest::Approx(M_PI));
  CHECK(spec.eta[2] == doctest::Approx(M_PI / 2));

  Eigen::MatrixXcd ccx = Eigen::MatrixXcd::Identity(8, 8);
  ccx(6, 6) = 0;
  ccx(7, 7) = 0;
  ccx(6, 7) = 1;
  ccx(7, 6) = 1;
  CHECK(equal_up_to_global_phase(ideal_matrix(spec), ccx, 1e-12));
}

TEST_CASE("controlled-phase specs") {
  Eigen::MatrixXcd cz = Eigen::MatrixXcd::Identity(4, 4);
  cz(3, 3) = -1.0;
  CHECK(equal_up_to_global_phase(ideal_matrix(controlled_phase_spec(2, M_PI)), cz, 1e-12));

  // C^2-S: phase i on |111>
  Eigen::MatrixXcd c2s = Eigen::MatrixXcd::Identity(8, 8);
  c2s(7, 7) = cxd(0, 1);
  CHECK(equal_up_to_global_phase(ideal_matrix(controlled_phase_spec(3, M_PI / 2)), c2s, 1e-12));
}

TEST_CASE("target unitary axis-angle decomposition") {
  GateSpec spec = GateSpec::base_protocol(2, M_PI);
  spec.eta[1] = M_PI / 2;
  spec.gamma[1] = 0.0;
  SingleQubitGate g = target_unitary(spec, 1);
  CHECK(g.axis.isApprox(Eigen::Vector3d(1, 0, 0), 1e-12));

  GateSpec zspec = GateSpec::base_protocol(2, M_PI / 2);
  SingleQubitGate z = target_unitary(zspec, 1);
  CHECK(z.axis.isApprox(Eigen::Vector3d(0, 0, 1), 1e-12));

  // U' = e^{i theta}|D><D| + |B><B| must match its own axis-angle form
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    GateSpec s = GateSpec::base_protocol(2, u(rng) * 2 * M_PI);
    s.eta[1] = u(rng) * M_PI;
    s.gamma[1] = u(rng) * 2 * M_PI;
    SingleQubitGate t = target_unitary(s, 1);
    SingleQubitGate rebuilt = SingleQubitGate::from_axis_angle(t.alpha, t.axis, t.theta);
    CHECK((t.u - rebuilt.u).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("axis-angle components satisfy the unit-norm identity on a grid") {
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      double eta = i * M_PI / 99.0, gamma = j * 2 * M_PI / 99.0;
      double sx = std::sin(eta) * std::cos(gamma);
      double sy = -std::sin(eta) * std::sin(gamma);
      double sz = 2.0 * std::sin(0.5 * eta) * std::sin(0.5 * eta) - 1.0;
      CHECK(std::abs(sx * sx + sy * sy + sz * sz - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("controlled rotation plans") {
  // r = z, theta = pi, alpha = pi/2: alpha' = 0, single operation
  RotationPlan pz = controlled_rotation_plan(Eigen::Vector3d(0, 0, 1), M_PI, M_PI / 2, 3);
  CHECK(pz.directly_realizable);
  CHECK(std::abs(pz.residual_phase) < 1e-12);
  CHECK(pz.spec.eta[2] == doctest::Approx(M_PI));

  // r = x, theta = pi, alpha = 0: eta = pi/2, gamma = 0, alpha' = -pi/2
  RotationPlan px = controlled_rotation_plan(Eigen::Vector3d(1, 0, 0), M_PI, 0.0, 2);
  CHECK_FALSE(px.directly_realizable);
  CHECK(px.residual_phase == doctest::Approx(-M_PI / 2));
  CHECK(px.spec.eta[1] == doctest::Approx(M_PI / 2));
  CHECK(px.spec.gamma[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(controlled_rotation_plan(Eigen::Vector3d(1, 1, 0), M_PI, 0.0, 2),
                  std::domain_error);

  // round trip: the planned spec reproduces (axis, theta)
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int i = 0; i < 40; ++i) {
    Eigen::Vector3d r(g(rng), g(rng), g(rng));
    r.normalize();
    double theta = 0.1 + 2.9 * std::abs(g(rng));
    RotationPlan plan = controlled_rotation_plan(r, theta, 0.3, 3);
    SingleQubitGate t = target_unitary(plan.spec, 2);
    CHECK(t.theta == doctest::Approx(theta).epsilon(1e-10));
    CHECK((t.axis - r).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("single-qubit gate decomposition round trip") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    SingleQubitGate g = random_unitary(rng);
    SingleQubitGate rebuilt = SingleQubitGate::from_axis_angle(g.alpha, g.axis, g.theta);
    CHECK((g.u - rebuilt.u).cwiseAbs().maxCoeff() < 1e-11);
  }
  Eigen::Matrix2cd notu;
  notu << 1, 1, 0, 1;
  CHECK_THROWS_AS(SingleQubitGate::from_matrix(notu), std::invalid_argument);
}

TEST_CASE("absorbing the identity leaves the spec's physical dark states unchanged") {
  GateSpec spec = toffoli_spec(3);
  std::vector<SingleQubitGate> ids(3, SingleQubitGate::identity());
  GateSpec out = absorb_single_qubit_gates(ids, spec);
  for (int q = 0; q < 3; ++q) {
    Eigen::Vector2cd a = bright_dark(spec.eta[q], spec.gamma[q]).dark;
    Eigen::Vector2cd b = bright_dark(out.eta[q], out.gamma[q]).dark;
    CHECK(std::abs(std::abs(a.dot(b)) - 1.0) < 1e-12);  // same state up to phase
  }
}

TEST_CASE("absorption circuit equivalence: Hadamard + CZ") {
  GateSpec cz = controlled_phase_spec(2, M_PI);
  Eigen::Matrix2cd h2;
  h2 << 1, 1, 1, -1;
  h2 /= std::sqrt(2.0);
  std::vector<SingleQubitGate> layer = {SingleQubitGate::from_matrix(h2),
                                        SingleQubitGate::identity()};
  GateSpec absorbed = absorb_single_qubit_gates(layer, cz);

  Eigen::MatrixXcd a_layer = kron(layer[0].u, layer[1].u);
  Eigen::MatrixXcd lhs = a_layer * ideal_matrix(absorbed);
  Eigen::MatrixXcd rhs = ideal_matrix(cz) * a_layer;
  CHECK(equal_up_to_global_phase(lhs, rhs, 1e-12));
}

TEST_CASE("absorption circuit equivalence on random layers (n = 2, 3)") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {2, 3}) {
    for (int rep = 0; rep < 10; ++rep) {
      GateSpec spec = GateSpec::base_protocol(n, u(rng) * 2 * M_PI);
      for (int q = 0; q < n; ++q) {
        spec.eta[q] = u(rng) * M_PI;
        spec.gamma[q] = u(rng) * 2 * M_PI;
      }
      std::vector<SingleQubitGate> layer;
      for (int q = 0; q < n; ++q) layer.push_back(random_unitary(rng));

      GateSpec absorbed = absorb_single_qubit_gates(layer, spec);
      Eigen::MatrixXcd a_layer = layer[0].u;
      for (int q = 1; q < n; ++q) a_layer = kron(a_layer, layer[q].u);
      Eigen::MatrixXcd lhs = a_layer * ideal_matrix(absorbed);
      Eigen::MatrixXcd rhs = ideal_matrix(spec) * a_layer;
      CHECK(equal_up_to_global_phase(lhs, rhs, 1e-10));
    }
  }
}

TEST_CASE("ideal matrix is unitary with eigenvalues 1 and e^{i theta}") {
  GateSpec spec = GateSpec::base_protocol(3, 0.7);
  spec.eta[1] = 1.1;
  spec.gamma[2] = 2.2;
  Eigen::MatrixXcd u = ideal_matrix(spec);
  CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
  int phase_count = 0;
  for (int i = 0; i < 8; ++i) {
    cxd ev = es.eigenvalues()[i];
    bool is_one = std::abs(ev - 1.0) < 1e-9;
    bool is_phase = std::abs(ev - cxd(std::cos(0.7), std::sin(0.7))) < 1e-9;
    CHECK((is_one || is_phase));
    if (is_phase) ++phase_count;
  }
  CHECK(phase_count == 1);
}
