#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sechyp {

/// Cached binomial coefficients. Values up to n = 55 come from Pascal's triangle
/// and are exact in double precision (all below 2^53); beyond that the log-space
/// form keeps evaluation overflow-free.
class BinomialCache {
 public:
  explicit BinomialCache(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw std::invalid_argument("BinomialCache: negative n_max");
    rows_.resize(n_max + 1);
    rows_[0] = {1.0};
    for (int n = 1; n <= n_max && n <= kExactLimit; ++n) {
      rows_[n].assign(n + 1, 1.0);
      for (int k = 1; k < n; ++k) rows_[n][k] = rows_[n - 1][k - 1] + rows_[n - 1][k];
    }
  }

  double operator()(int n, int k) const {
    if (k < 0 || k > n) return 0.0;
    if (n <= kExactLimit) return rows_[n][k];
    return std::exp(log_binom(n, k));
  }

  double log_binom(int n, int k) const {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (n <= kExactLimit) return std::log(rows_[n][k]);
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  }

  static constexpr int kExactLimit = 55;

 private:
  int n_max_;
  std::vector<std::vector<double>> rows_;
};

/// Kahan compensated accumulator for sums with cancelling terms.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace sechyp
