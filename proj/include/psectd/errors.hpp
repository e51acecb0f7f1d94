#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace psectd {

/// Iterative solver or learner exceeded its iteration budget or blew past the
/// divergence guard. Carries whatever residual/trace information the caller
/// needs to diagnose the failure.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double residual,
                  std::vector<double> trace = {})
      : std::runtime_error(what), residual_(residual), trace_(std::move(trace)) {}

  double residual() const { return residual_; }
  const std::vector<double>& trace() const { return trace_; }

 private:
  double residual_;
  std::vector<double> trace_;
};

/// Linear system was singular (or numerically unsolvable) at epsilon = 0.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_(condition_estimate) {}

  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

/// Bad experiment config (unknown key, malformed value, missing field).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace psectd
