#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sechyp {

/// Adaptive integration ran out of steps. Carries the last reached time and state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(std::string msg, double t, Eigen::VectorXcd last_state)
      : std::runtime_error(std::move(msg)), t_(t), last_state_(std::move(last_state)) {}
  double t() const { return t_; }
  const Eigen::VectorXcd& last_state() const { return last_state_; }

 private:
  double t_;
  Eigen::VectorXcd last_state_;
};

/// NaN/Inf appeared in a right-hand side or error estimate.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string msg, double t) : std::runtime_error(std::move(msg)), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// The backward recursion for the effective shift hit a zero denominator.
class SingularRecursionError : public std::runtime_error {
 public:
  explicit SingularRecursionError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

}  // namespace sechyp
