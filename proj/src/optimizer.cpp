#include "sechyp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sechyp {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& initial_step,
                             const NelderMeadOptions& opts) {
  const int dim = static_cast<int>(x0.size());
  if (initial_step.size() != dim)
    throw std::invalid_argument("nelder_mead: step size dimension mismatch");

  NelderMeadResult res;
  res.x = x0;
  res.fx = std::numeric_limits<double>::infinity();

  struct Vertex {
    Eigen::VectorXd x;
    double fx;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);

  bool nan_seen = false;
  auto eval = [&](const Eigen::VectorXd& x) {
    double v = f(x);
    ++res.evaluations;
    if (std::isnan(v)) {
      nan_seen = true;
      return std::numeric_limits<double>::infinity();
    }
    if (v < res.fx) {
      res.fx = v;
      res.x = x;
    }
    return v;
  };

  simplex.push_back({x0, eval(x0)});
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd x = x0;
    x[i] += initial_step[i];
    simplex.push_back({x, eval(x)});
  }

  auto by_f = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };
  while (!nan_seen && res.evaluations < opts.max_evals) {
    std::sort(simplex.begin(), simplex.end(), by_f);

    double scale = std::max(1.0, simplex[0].x.cwiseAbs().maxCoeff());
    double diameter = 0.0;
    for (int i = 1; i <= dim; ++i)
      diameter = std::max(diameter, (simplex[i].x - simplex[0].x).cwiseAbs().maxCoeff());
    if (diameter < opts.simplex_rel_tol * scale) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) centroid += simplex[i].x;
    centroid /= dim;
    Vertex& worst = simplex[dim];

    Eigen::VectorXd xr = centroid + (centroid - worst.x);
    double fr = eval(xr);
    if (fr < simplex[0].fx) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst.x);
      double fe = eval(xe);
      if (fe < fr)
        worst = {xe, fe};
      else
        worst = {xr, fr};
    } else if (fr < simplex[dim - 1].fx) {
      worst = {xr, fr};
    } else if (fr < worst.fx) {
      Eigen::VectorXd xc = centroid + 0.5 * (xr - centroid);  // outside contraction
      double fc = eval(xc);
      if (fc <= fr) {
        worst = {xc, fc};
      } else {
        for (int i = 1; i <= dim; ++i) {
          simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
          simplex[i].fx = eval(simplex[i].x);
        }
      }
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (worst.x - centroid);  // inside contraction
      double fc = eval(xc);
      if (fc < worst.fx) {
        worst = {xc, fc};
      } else {
        for (int i = 1; i <= dim; ++i) {
          simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
          simplex[i].fx = eval(simplex[i].x);
        }
      }
    }
  }
  res.aborted_nan = nan_seen;
  return res;
}

namespace {

cxd cis(double phi) { return {std::cos(phi), std::sin(phi)}; }

}  // namespace

OptimizeResult optimize_gate_params(int n, double delta_omega_t2, const TransferTable& table,
                                    double alpha, const NelderMeadOptions& opts) {
  if (n < 1) throw std::invalid_argument("optimize_gate_params: n must be >= 1");
  if (!(delta_omega_t2 > 0))
    throw std::invalid_argument("optimize_gate_params: delta_omega_t2 must be > 0");
  const TransferTableKey& key = table.key();
  if (key.n_max < n) throw std::invalid_argument("optimize_gate_params: table too small for n");

  // Units: delta_omega = 1, so T2 = delta_omega_t2 and omega0 is measured in
  // units of the shift.
  const double t2 = delta_omega_t2;
  const double lnw = 2.0 * std::log(1.0 + std::sqrt(2.0));
  std::vector<cxd> a(static_cast<std::size_t>(n));

  auto objective = [&](const Eigen::VectorXd& x) {
    const double omega0 = x[0], ratio = x[1];
    if (!(omega0 > 0.0) || ratio < key.ratio_min || ratio > key.ratio_max) {
      double excess = std::max({0.0 - omega0, key.ratio_min - ratio, ratio - key.ratio_max});
      return 1e6 * (1.0 + std::max(excess, 0.0));
    }
    const double beta = key.beta_ratio * omega0;
    const double t_g = ratio * lnw / beta;
    const double gamma = alpha * t_g / t2;
    const double lambda = 2.0 * omega0 * omega0 / beta * std::tanh(0.5 * beta * t_g);
    for (int n0 = 1; n0 <= n; ++n0)
      a[static_cast<std::size_t>(n0 - 1)] =
          table.interpolate(n0, ratio) * cis(2.0 * (n0 - 1) * lambda / 4.0);
    return total_error_uniform(n, a, gamma);
  };

  // Fixed multi-start grid around the dephasing/AC balance point
  // omega0* ~ (2/T2)^(1/3); the transfer-error oscillation makes single starts
  // unreliable.
  const double omega_star = std::cbrt(2.0 / t2);
  const double ratio_mid = 0.5 * (key.ratio_min + key.ratio_max);
  OptimizeResult best;
  best.epsilon_min = std::numeric_limits<double>::infinity();
  for (double fac : {0.5, 1.0, 2.0, 4.0}) {
    for (double ratio0 : {ratio_mid - 2.0, ratio_mid + 1.0}) {
      Eigen::VectorXd x0(2), step(2);
      x0 << omega_star * fac, std::clamp(ratio0, key.ratio_min, key.ratio_max);
      step << 0.4 * x0[0], 1.0;
      NelderMeadResult r = nelder_mead(objective, x0, step, opts);
      best.evaluations += r.evaluations;
      if (r.fx < best.epsilon_min) {
        best.epsilon_min = r.fx;
        best.omega0_opt = r.x[0];
        best.tg_ratio_opt = std::clamp(r.x[1], key.ratio_min, key.ratio_max);
      }
    }
  }
  return best;
}

}  // namespace sechyp
