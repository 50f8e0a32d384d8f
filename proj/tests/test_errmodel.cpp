#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "sechyp/errmodel.hpp"
#include "sechyp/blockade.hpp"

using namespace sechyp;

namespace {
const SechypParams kPulse = SechypParams::family(3.0, 1.0 / 3.0, 6.0);
constexpr double kTheta = M_PI;

std::vector<cxd> ones(int n) { return std::vector<cxd>(n, cxd(1, 0)); }
}  // namespace

TEST_CASE("perfect-gate identity: A = 1, gamma = 0 gives exactly zero for n = 1..50") {
  for (int n = 1; n <= 50; ++n) {
    double eps = total_error_uniform(n, ones(n), 0.0);
    CHECK(std::abs(eps) < 1e-12);
  }
}

TEST_CASE("uniform error is nondecreasing in gamma") {
  for (int n : {3, 10, 25}) {
    double prev = -1.0;
    for (double gamma : {0.0, 0.01, 0.05, 0.2, 1.0}) {
      double eps = total_error_uniform(n, ones(n), gamma);
      CHECK(eps >= prev - 1e-14);
      prev = eps;
    }
  }
}

TEST_CASE("large-n dephasing tends toward 1 - e^{-2 gamma}") {
  const double gamma = 0.05;
  double limit = 1.0 - std::exp(-2.0 * gamma);
  double eps = total_error_uniform(50, ones(50), gamma);
  CHECK(eps / limit > 0.85);
  CHECK(eps / limit < 1.0 + 1e-12);
}

TEST_CASE("amplitude factor") {
  CHECK(std::abs(amplitude_factor(1, cxd(0.9, 0.1), 6.0, 30.0) - cxd(0.9, 0.1)) < 1e-15);
  cxd a = amplitude_factor(3, cxd(1, 0), 6.0, 30.0);
  CHECK(a.real() == doctest::Approx(std::cos(0.2)).epsilon(1e-14));
  CHECK(a.imag() == doctest::Approx(std::sin(0.2)).epsilon(1e-14));
  CHECK(std::abs(amplitude_factor(5, cxd(0.8, -0.3), 6.0,
                                  std::numeric_limits<double>::infinity()) -
                 cxd(0.8, -0.3)) < 1e-15);
  CHECK_THROWS_AS(amplitude_factor(3, cxd(1, 0), 6.0, 0.0), std::domain_error);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    cxd t(u(rng), u(rng));
    CHECK(std::abs(std::abs(amplitude_factor(4, t, 6.0, 25.0)) - std::abs(t)) < 1e-14);
  }
}

TEST_CASE("general estimate reduces to the uniform formula at gamma = 0") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int n : {2, 5, 9}) {
    std::vector<cxd> a(n);
    for (int i = 0; i < n; ++i) a[i] = cxd(1.0 + u(rng) * 0.05, u(rng));
    double e_uniform = total_error_uniform(n, a, 0.0);
    double e_general = total_error_general(n, InitialStateSpec::uniform(), a, 0.0);
    CHECK(std::abs(e_uniform - e_general) < 1e-12);
  }
}

TEST_CASE("all-dark initial state has zero estimated error") {
  std::vector<double> p(6, 0.0);
  p[0] = 1.0;
  double eps = total_error_general(5, InitialStateSpec::explicit_probs(p), ones(5), 0.4);
  CHECK(std::abs(eps) < 1e-14);
}

TEST_CASE("GHZ AC error grows quadratically in n") {
  // pure AC phase: A(n0) = exp(i phi (n0 - 1))
  auto eps_ghz = [&](int n, double phi) {
    std::vector<cxd> a(n);
    for (int n0 = 1; n0 <= n; ++n0)
      a[n0 - 1] = cxd(std::cos(phi * (n0 - 1)), std::sin(phi * (n0 - 1)));
    return total_error_general(n, InitialStateSpec::ghz(), a, 0.0);
  };
  const double phi = 1e-3;
  double e10 = eps_ghz(10, phi), e20 = eps_ghz(20, phi), e40 = eps_ghz(40, phi);
  CHECK(e20 / e10 == doctest::Approx(std::pow(19.0 / 9.0, 2)).epsilon(0.02));
  CHECK(e40 / e20 == doctest::Approx(std::pow(39.0 / 19.0, 2)).epsilon(0.02));
}

TEST_CASE("initial state specs validate") {
  CHECK_THROWS_AS(InitialStateSpec::explicit_probs({0.5, 0.4}).probabilities(2),
                  std::invalid_argument);
  CHECK_THROWS_AS(InitialStateSpec::explicit_probs({0.5, 0.6, -0.1}).probabilities(2),
                  std::invalid_argument);
  auto p = InitialStateSpec::uniform().probabilities(4);
  CHECK(p[0] == doctest::Approx(1.0 / 16));
  CHECK(p[2] == doctest::Approx(6.0 / 16));
}

TEST_CASE("transfer table: build, node identity, interpolation, persistence") {
  TransferTableKey key;
  key.n_max = 4;
  key.ratio_count = 9;
  key.rel_tol = key.abs_tol = 1e-9;
  TransferTable table = TransferTable::build(key, 2);

  // node-exact interpolation
  for (int n0 : {1, 2, 4}) {
    for (int j : {0, 4, 8}) {
      cxd node = table.at_node(n0, j);
      cxd interp = table.interpolate(n0, table.ratio_node(j));
      CHECK(std::abs(node - interp) == 0.0);
    }
  }

  // transfer error decreases (up to oscillation) as the cutoff grows
  double err_short = 1.0 - std::norm(table.at_node(1, 0));
  double err_long = 1.0 - std::norm(table.at_node(1, 8));
  CHECK(err_long < err_short);

  CHECK_THROWS_AS(table.interpolate(0.5, 5.0), std::domain_error);
  CHECK_THROWS_AS(table.interpolate(2, 10.5), std::domain_error);
  CHECK_THROWS_AS(table.interpolate(5, 5.0), std::domain_error);  // n0 beyond n_max

  const std::string path = "test_transfer_table.csv";
  table.save(path);
  auto loaded = TransferTable::load(path);
  REQUIRE(loaded.has_value());
  CHECK(loaded->key().matches(key));
  for (int n0 = 1; n0 <= 4; ++n0)
    for (int j = 0; j < 9; ++j)
      CHECK(std::abs(loaded->at_node(n0, j) - table.at_node(n0, j)) == 0.0);

  // cache invalidation: a different key must not accept the stored file
  TransferTableKey other = key;
  other.ratio_count = 5;
  TransferTable rebuilt = TransferTable::load_or_build(other, path, 2);
  CHECK(rebuilt.key().matches(other));
  std::filesystem::remove(path);
}

TEST_CASE("transfer error oscillates along the n0 axis") {
  TransferTableKey key;
  key.n_max = 16;
  key.ratio_count = 2;
  key.rel_tol = key.abs_tol = 1e-9;
  TransferTable table = TransferTable::build(key, 2);
  bool nonmonotone = false;
  double prev = 1.0 - std::norm(table.at_node(1, 0));
  for (int n0 = 2; n0 <= 16; ++n0) {
    double err = 1.0 - std::norm(table.at_node(n0, 0));
    if (err < prev) nonmonotone = true;
    prev = err;
  }
  CHECK(nonmonotone);
}

TEST_CASE("arbitrary-shift estimate equals the uniform formula for equal shifts") {
  const double delta = 30.0;
  RegisterConfig cfg = RegisterConfig::uniform(5, delta);
  IntegratorOptions opts;
  ArbitraryShiftEstimator est(kPulse, kTheta, 5, opts, 2);

  std::vector<cxd> a(5);
  for (int n0 = 1; n0 <= 5; ++n0)
    a[n0 - 1] = amplitude_factor(n0, est.transfer(n0), est.lambda(), delta);
  double direct = total_error_uniform(5, a, 0.0);
  double from_est = est.estimate(cfg, InitialStateSpec::uniform(), false, 2);
  CHECK(std::abs(direct - from_est) < 1e-12);
}

TEST_CASE("per-state aggregation matches the uniform formula when run per-state") {
  // Nearly-equal shifts perturb each state's effective shift slightly; the
  // per-state machinery must still agree with Eq-style sector bookkeeping when
  // the shifts are exactly equal (covered above) and stay close for tiny spread.
  ShiftDistribution dist{29.0, 31.0, false, 12};
  Eigen::MatrixXd shifts = sample_shifts(dist, 5);
  RegisterConfig cfg = RegisterConfig::with_shifts(shifts);
  IntegratorOptions opts;
  ArbitraryShiftEstimator est(kPulse, kTheta, 5, opts, 2);
  double chain_mode = est.estimate(cfg, InitialStateSpec::uniform(), false, 2);
  double shortcut = est.estimate(cfg, InitialStateSpec::uniform(), true, 2);
  CHECK(chain_mode == doctest::Approx(shortcut).epsilon(0.05));
}

TEST_CASE("positive-shift shortcut tracks the chain-mode estimate") {
  ShiftDistribution dist{15.0, 1500.0, false, 8};
  Eigen::MatrixXd shifts = sample_shifts(dist, 6);
  RegisterConfig cfg = RegisterConfig::with_shifts(shifts);
  IntegratorOptions opts;
  ArbitraryShiftEstimator est(kPulse, kTheta, 6, opts, 2);
  double chain_mode = est.estimate(cfg, InitialStateSpec::uniform(), false, 2);
  double shortcut = est.estimate(cfg, InitialStateSpec::uniform(), true, 2);
  CHECK(shortcut == doctest::Approx(chain_mode).epsilon(0.5));

  ShiftDistribution mixed{15.0, 1500.0, true, 8};
  RegisterConfig mcfg = RegisterConfig::with_shifts(sample_shifts(mixed, 6));
  CHECK_THROWS_AS(est.estimate(mcfg, InitialStateSpec::uniform(), true, 2),
                  std::domain_error);
}

TEST_CASE("mixed-sign estimate saturates with n") {
  IntegratorOptions opts;
  ArbitraryShiftEstimator est(kPulse, kTheta, 13, opts, 2);
  auto mean_eps = [&](int n) {
    double sum = 0.0;
    int count = 0;
    for (int rep = 0; rep < 12; ++rep) {
      ShiftDistribution dist{15.0, 1500.0, true, std::uint64_t(9000 + 37 * rep)};
      RegisterConfig cfg = RegisterConfig::with_shifts(sample_shifts(dist, n));
      try {
        sum += est.estimate(cfg, InitialStateSpec::uniform(), false, 2);
        ++count;
      } catch (const SingularRecursionError&) {
        // mixed signs can produce singular chains; skip those draws
      }
    }
    REQUIRE(count >= 6);
    return sum / count;
  };
  double e4 = mean_eps(4), e7 = mean_eps(7), e10 = mean_eps(10), e13 = mean_eps(13);
  CHECK(e13 - e10 < e7 - e4);  // growth slows: saturation by n ~ 10-13
}

TEST_CASE("quartering: halving omega0/delta reduces the AC error by ~4") {
  // High cutoff ratio keeps the transfer error below 1e-6 so the AC term dominates.
  SechypParams slow = SechypParams::family(3.0, 1.0 / 3.0, 9.5);
  IntegratorOptions opts;
  ArbitraryShiftEstimator est(slow, kTheta, 4, opts, 2);
  double t_err = 1.0 - std::norm(est.transfer(4));
  REQUIRE(t_err < 1e-6);

  auto eps_at = [&](double delta) {
    RegisterConfig cfg = RegisterConfig::uniform(4, delta);
    return est.estimate(cfg, InitialStateSpec::uniform(), false, 2);
  };
  double ratio1 = eps_at(60.0) / eps_at(120.0);
  double ratio2 = eps_at(120.0) / eps_at(240.0);
  CHECK(ratio1 > 3.5);
  CHECK(ratio1 < 4.5);
  CHECK(ratio2 > 3.5);
  CHECK(ratio2 < 4.5);
}
