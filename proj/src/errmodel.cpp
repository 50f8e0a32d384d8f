#include "sechyp/errmodel.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "sechyp/binomial.hpp"
#include "sechyp/blockade.hpp"
#include "sechyp/errors.hpp"
#include "sechyp/parallel.hpp"

namespace sechyp {

namespace {

cxd cis(double phi) { return {std::cos(phi), std::sin(phi)}; }

bool close(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= 1e-12 * scale;
}

}  // namespace

bool TransferTableKey::matches(const TransferTableKey& o) const {
  return close(mu, o.mu) && close(beta_ratio, o.beta_ratio) && close(theta, o.theta) &&
         n_max == o.n_max && close(ratio_min, o.ratio_min) && close(ratio_max, o.ratio_max) &&
         ratio_count == o.ratio_count && close(rel_tol, o.rel_tol) && close(abs_tol, o.abs_tol);
}

TransferTable TransferTable::build(const TransferTableKey& key, int jobs) {
  if (key.n_max < 1 || key.n_max > 50)
    throw std::invalid_argument("TransferTable: n_max must be in [1, 50]");
  if (key.ratio_count < 2 || !(key.ratio_min < key.ratio_max) || key.ratio_min < 2.0 ||
      key.ratio_max > 10.0)
    throw std::invalid_argument("TransferTable: ratio grid must lie within [2, 10]");

  TransferTable table;
  table.key_ = key;
  table.t_.resize(key.n_max, key.ratio_count);

  IntegratorOptions opts;
  opts.rel_tol = key.rel_tol;
  opts.abs_tol = key.abs_tol;

  const std::size_t total = static_cast<std::size_t>(key.n_max) * key.ratio_count;
  parallel_for(total, jobs, [&](std::size_t idx) {
    int n0 = static_cast<int>(idx / key.ratio_count) + 1;
    int j = static_cast<int>(idx % key.ratio_count);
    SechypParams p = SechypParams::family(key.mu, key.beta_ratio, table.ratio_node(j));
    cxd t = two_level_transfer(p, std::sqrt(double(n0)), key.theta, opts);
    if (std::abs(t) > 1.0 + 1e-8)
      throw NumericalError("TransferTable: |T| exceeded 1 + 1e-8", table.ratio_node(j));
    table.t_(n0 - 1, j) = t;
  });
  return table;
}

double TransferTable::ratio_node(int j) const {
  return key_.ratio_min + j * (key_.ratio_max - key_.ratio_min) / (key_.ratio_count - 1);
}

cxd TransferTable::at_node(int n0, int ratio_index) const {
  return t_(n0 - 1, ratio_index);
}

cxd TransferTable::interpolate(double n0, double ratio) const {
  if (!(n0 >= 1.0) || !(n0 <= key_.n_max) || !(ratio >= key_.ratio_min) ||
      !(ratio <= key_.ratio_max))
    throw std::domain_error("TransferTable: query outside grid (no extrapolation)");

  int i0 = std::min(static_cast<int>(std::floor(n0)) - 1, key_.n_max - 2);
  i0 = std::max(i0, 0);
  double u = key_.n_max == 1 ? 0.0 : n0 - (i0 + 1);

  double step = (key_.ratio_max - key_.ratio_min) / (key_.ratio_count - 1);
  int j0 = std::min(static_cast<int>(std::floor((ratio - key_.ratio_min) / step)),
                    key_.ratio_count - 2);
  j0 = std::max(j0, 0);
  double v = (ratio - ratio_node(j0)) / step;
  u = std::clamp(u, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);

  auto row_mix = [&](int j) {
    if (key_.n_max == 1) return t_(0, j);
    return (1.0 - u) * t_(i0, j) + u * t_(i0 + 1, j);
  };
  return (1.0 - v) * row_mix(j0) + v * row_mix(j0 + 1);
}

void TransferTable::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("TransferTable: cannot write " + path);
  char buf[512];
  os << "# sechyp transfer table v1\n";
  std::snprintf(buf, sizeof buf,
                "# mu=%.17g beta_ratio=%.17g theta=%.17g n_max=%d ratio_min=%.17g "
                "ratio_max=%.17g ratio_count=%d rel_tol=%.17g abs_tol=%.17g\n",
                key_.mu, key_.beta_ratio, key_.theta, key_.n_max, key_.ratio_min,
                key_.ratio_max, key_.ratio_count, key_.rel_tol, key_.abs_tol);
  os << buf;
  os << "n0,ratio_index,re_t,im_t\n";
  for (int n0 = 1; n0 <= key_.n_max; ++n0)
    for (int j = 0; j < key_.ratio_count; ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", n0, j, t_(n0 - 1, j).real(),
                    t_(n0 - 1, j).imag());
      os << buf;
    }
}

std::optional<TransferTable> TransferTable::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string line;
  if (!std::getline(is, line) || line != "# sechyp transfer table v1") return std::nullopt;
  if (!std::getline(is, line)) return std::nullopt;

  TransferTableKey key;
  if (std::sscanf(line.c_str(),
                  "# mu=%lg beta_ratio=%lg theta=%lg n_max=%d ratio_min=%lg ratio_max=%lg "
                  "ratio_count=%d rel_tol=%lg abs_tol=%lg",
                  &key.mu, &key.beta_ratio, &key.theta, &key.n_max, &key.ratio_min,
                  &key.ratio_max, &key.ratio_count, &key.rel_tol, &key.abs_tol) != 9)
    return std::nullopt;
  if (!std::getline(is, line)) return std::nullopt;  // column header

  TransferTable table;
  table.key_ = key;
  table.t_.resize(key.n_max, key.ratio_count);
  Eigen::MatrixXd seen = Eigen::MatrixXd::Zero(key.n_max, key.ratio_count);
  while (std::getline(is, line)) {
    int n0, j;
    double re, im;
    if (std::sscanf(line.c_str(), "%d,%d,%lg,%lg", &n0, &j, &re, &im) != 4) return std::nullopt;
    if (n0 < 1 || n0 > key.n_max || j < 0 || j >= key.ratio_count) return std::nullopt;
    table.t_(n0 - 1, j) = cxd(re, im);
    seen(n0 - 1, j) = 1.0;
  }
  if (seen.minCoeff() < 1.0) return std::nullopt;  // incomplete file
  return table;
}

TransferTable TransferTable::load_or_build(const TransferTableKey& key, const std::string& path,
                                           int jobs) {
  if (auto t = load(path); t && t->key().matches(key)) return std::move(*t);
  TransferTable t = build(key, jobs);
  t.save(path);
  return t;
}

cxd amplitude_factor(int n0, cxd transfer, double lambda, double delta_omega_eff) {
  if (n0 < 1) throw std::invalid_argument("amplitude_factor: n0 must be >= 1");
  if (delta_omega_eff == 0.0)
    throw std::domain_error("amplitude_factor: zero effective shift");
  if (std::isinf(delta_omega_eff) || n0 == 1) return transfer;
  return transfer * cis(2.0 * (n0 - 1) * lambda / (4.0 * delta_omega_eff));
}

double total_error_uniform(int n, std::span<const cxd> a, double gamma) {
  if (n < 1) throw std::invalid_argument("total_error_uniform: n must be >= 1");
  if (static_cast<int>(a.size()) < n)
    throw std::invalid_argument("total_error_uniform: need A(n0) for n0 = 1..n");
  if (gamma < 0.0) throw std::invalid_argument("total_error_uniform: gamma must be >= 0");

  BinomialCache binom(n);
  const bool exact = n <= BinomialCache::kExactLimit;
  const double scale = exact ? std::exp2(-2.0 * n) : 0.0;
  const double log_scale = -2.0 * n * std::log(2.0);
  const double eg = std::exp(-gamma);
  const double e2g = std::exp(-2.0 * gamma);

  KahanSum sum;
  sum.add(exact ? scale : std::exp(log_scale));  // the |11...1><11...1| term

  for (int n0 = 1; n0 <= n; ++n0) {
    double w = exact ? binom(n, n0) * scale : std::exp(binom.log_binom(n, n0) + log_scale);
    sum.add(w * 2.0 * eg * a[n0 - 1].real());
  }

  for (int n0 = 1; n0 <= n; ++n0) {
    for (int m0 = 1; m0 <= n; ++m0) {
      const double re = (a[n0 - 1] * std::conj(a[m0 - 1])).real();
      const double inv_nm = 1.0 / (static_cast<double>(n0) * m0);
      const int k_lo = std::max(n0 + m0 - n, 0);
      const int k_hi = std::min(n0, m0);
      for (int k = k_lo; k <= k_hi; ++k) {
        double w = exact ? binom(n, n0) * binom(n0, k) * binom(n - n0, m0 - k) * scale
                         : std::exp(binom.log_binom(n, n0) + binom.log_binom(n0, k) +
                                    binom.log_binom(n - n0, m0 - k) + log_scale);
        double deph = (k + (static_cast<double>(n0) * m0 - k) * e2g) * inv_nm;
        sum.add(w * re * deph);
      }
    }
  }
  return 1.0 - sum.sum;
}

InitialStateSpec InitialStateSpec::uniform() { return {Kind::Uniform, {}}; }
InitialStateSpec InitialStateSpec::ghz() { return {Kind::Ghz, {}}; }
InitialStateSpec InitialStateSpec::explicit_probs(std::vector<double> p) {
  return {Kind::Explicit, std::move(p)};
}

std::vector<double> InitialStateSpec::probabilities(int n) const {
  std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
  switch (kind) {
    case Kind::Uniform: {
      BinomialCache binom(n);
      double scale = std::exp2(-double(n));
      for (int n0 = 0; n0 <= n; ++n0)
        p[static_cast<std::size_t>(n0)] =
            n <= BinomialCache::kExactLimit
                ? binom(n, n0) * scale
                : std::exp(binom.log_binom(n, n0) - n * std::log(2.0));
      break;
    }
    case Kind::Ghz:
      p[0] = 0.5;
      p[static_cast<std::size_t>(n)] = 0.5;
      break;
    case Kind::Explicit: {
      if (static_cast<int>(probs.size()) != n + 1)
        throw std::invalid_argument("InitialStateSpec: explicit probabilities need n + 1 entries");
      double total = 0.0;
      for (double v : probs) {
        if (v < 0.0) throw std::invalid_argument("InitialStateSpec: negative probability");
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("InitialStateSpec: probabilities must sum to 1");
      p = probs;
      break;
    }
  }
  return p;
}

double total_error_general(int n, const InitialStateSpec& initial,
                           std::span<const cxd> a, double gamma) {
  if (static_cast<int>(a.size()) < n)
    throw std::invalid_argument("total_error_general: need A(n0) for n0 = 1..n");
  std::vector<double> p = initial.probabilities(n);
  const double eg = std::exp(-gamma);
  const double e2g = std::exp(-2.0 * gamma);

  KahanSum sum;
  sum.add(p[0] * p[0]);
  for (int n0 = 1; n0 <= n; ++n0)
    sum.add(p[0] * p[static_cast<std::size_t>(n0)] * 2.0 * eg * a[n0 - 1].real());
  for (int n0 = 1; n0 <= n; ++n0)
    for (int m0 = 1; m0 <= n; ++m0)
      sum.add(p[static_cast<std::size_t>(n0)] * p[static_cast<std::size_t>(m0)] *
              (a[n0 - 1] * std::conj(a[m0 - 1])).real() * e2g);
  return 1.0 - sum.sum;
}

ArbitraryShiftEstimator::ArbitraryShiftEstimator(const SechypParams& p, double theta, int n_max,
                                                 const IntegratorOptions& opts, int jobs)
    : pulse_(p), theta_(theta), lambda_(pulse_area_lambda(p)) {
  if (n_max < 1) throw std::invalid_argument("ArbitraryShiftEstimator: n_max must be >= 1");
  t_.resize(static_cast<std::size_t>(n_max));
  parallel_for(t_.size(), jobs, [&](std::size_t i) {
    t_[i] = two_level_transfer(p, std::sqrt(double(i + 1)), theta, opts);
  });
}

double ArbitraryShiftEstimator::estimate(const RegisterConfig& cfg,
                                         const InitialStateSpec& initial,
                                         bool average_shift_shortcut, int jobs) const {
  cfg.validate();
  const int n = cfg.n;
  if (static_cast<int>(t_.size()) < n)
    throw std::invalid_argument("ArbitraryShiftEstimator: built for smaller n");
  const double gamma = std::isfinite(cfg.t2) ? cfg.alpha * pulse_.t_cutoff / cfg.t2 : 0.0;

  // Uniform or infinite shifts reduce to a single per-sector A(n0).
  auto sector_estimate = [&](double delta_eff) {
    std::vector<cxd> a(static_cast<std::size_t>(n));
    for (int n0 = 1; n0 <= n; ++n0)
      a[static_cast<std::size_t>(n0 - 1)] =
          amplitude_factor(n0, t_[static_cast<std::size_t>(n0 - 1)], lambda_, delta_eff);
    if (initial.kind == InitialStateSpec::Kind::Uniform)
      return total_error_uniform(n, a, gamma);
    return total_error_general(n, initial, a, gamma);
  };

  if (cfg.all_shifts_infinite())
    return sector_estimate(std::numeric_limits<double>::infinity());

  if (average_shift_shortcut) {
    if (!cfg.all_shifts_positive())
      throw std::domain_error("average-shift shortcut needs all-positive shifts");
    return sector_estimate(average_shift(cfg.shifts));
  }

  if (n > 20)
    throw std::invalid_argument("chain-mode estimate guarded at n <= 20 (2^n chains)");

  bool uniform_shifts = true;
  double first = cfg.shifts(0, 1);
  for (int q = 0; q < n && uniform_shifts; ++q)
    for (int p = q + 1; p < n; ++p)
      if (cfg.shifts(q, p) != first) {
        uniform_shifts = false;
        break;
      }
  if (n >= 2 && uniform_shifts) return sector_estimate(first);

  // Per-state amplitude factors from the chain-derived effective shifts.
  const std::size_t count = std::size_t(1) << n;
  std::vector<cxd> a_state(count);
  std::string failure;
  std::mutex failure_mutex;
  parallel_for(count, jobs, [&](std::size_t bits) {
    int n0 = std::popcount(static_cast<std::uint32_t>(bits));
    if (n0 == 0) {
      a_state[bits] = 0.0;  // the all-dark state enters as the constant term
      return;
    }
    if (n0 == 1) {
      a_state[bits] = t_[0];
      return;
    }
    std::vector<int> zq;
    zq.reserve(static_cast<std::size_t>(n0));
    for (int q = 0; q < n; ++q)
      if (bits & (std::size_t(1) << q)) zq.push_back(q);
    Eigen::MatrixXd sub(n0, n0);
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n0; ++j) sub(i, j) = i == j ? 0.0 : cfg.shifts(zq[i], zq[j]);
    try {
      double eff = effective_shift(build_chain(n0, sub));
      a_state[bits] = amplitude_factor(n0, t_[static_cast<std::size_t>(n0 - 1)], lambda_, eff);
    } catch (const SingularRecursionError& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (failure.empty()) {
        std::ostringstream os;
        os << e.what() << " (state bits=0x" << std::hex << bits << ")";
        failure = os.str();
      }
    } catch (const std::domain_error& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (failure.empty()) failure = e.what();
    }
  });
  if (!failure.empty()) throw SingularRecursionError(failure);

  if (initial.kind != InitialStateSpec::Kind::Uniform) {
    // Sector-averaged amplitude factors feed the sector-probability estimate;
    // exact when the occupied sectors are equally distributed over their states.
    BinomialCache binom(n);
    std::vector<cxd> a(static_cast<std::size_t>(n), cxd(0, 0));
    for (std::size_t bits = 1; bits < count; ++bits)
      a[static_cast<std::size_t>(std::popcount(static_cast<std::uint32_t>(bits)) - 1)] +=
          a_state[bits];
    for (int n0 = 1; n0 <= n; ++n0) a[static_cast<std::size_t>(n0 - 1)] /= binom(n, n0);
    return total_error_general(n, initial, a, gamma);
  }

  // Uniform superposition: per-state pairing with the exact overlap counting.
  //   eps = 1 - 2^{-2n} [ 1 + 2 e^-g Re(S) + e^-2g |S|^2 + (1 - e^-2g) sum_q |B_q|^2 ],
  // S = sum_s A_s and B_q = sum_{s: q in Z(s)} A_s / n0(s); the B_q term is the
  // pairwise overlap count k(s, s') summed per qubit.
  const double eg = std::exp(-gamma);
  const double e2g = std::exp(-2.0 * gamma);
  cxd s_sum(0, 0);
  for (std::size_t bits = 1; bits < count; ++bits) s_sum += a_state[bits];
  double b_term = 0.0;
  if (e2g < 1.0) {
    std::vector<cxd> b(static_cast<std::size_t>(n), cxd(0, 0));
    for (std::size_t bits = 1; bits < count; ++bits) {
      int n0 = std::popcount(static_cast<std::uint32_t>(bits));
      cxd w = a_state[bits] / double(n0);
      for (int q = 0; q < n; ++q)
        if (bits & (std::size_t(1) << q)) b[static_cast<std::size_t>(q)] += w;
    }
    for (const cxd& bq : b) b_term += std::norm(bq);
  }
  double total = 1.0 + 2.0 * eg * s_sum.real() + e2g * std::norm(s_sum) + (1.0 - e2g) * b_term;
  return std::clamp(1.0 - total * std::exp2(-2.0 * n), 0.0, 1.0);
}

double estimate_with_arbitrary_shifts(const RegisterConfig& cfg, const SechypParams& p,
                                      double theta, const InitialStateSpec& initial,
                                      bool average_shift_shortcut,
                                      const IntegratorOptions& opts, int jobs) {
  ArbitraryShiftEstimator est(p, theta, cfg.n, opts, jobs);
  return est.estimate(cfg, initial, average_shift_shortcut, jobs);
}

}  // namespace sechyp
