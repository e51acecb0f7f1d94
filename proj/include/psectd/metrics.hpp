#pragma once

#include <vector>

#include "psectd/core.hpp"

namespace psectd {

/// Non-negative state weights, normalized to sum to 1 over the support.
struct StateWeighting {
  std::vector<double> weights;

  static StateWeighting uniform_over(const std::vector<int>& states, int n_states);
  /// Uniform over the model's non-terminal states.
  static StateWeighting uniform_nonterminal(const TabularMDP& model);
};

/// Weighted squared gap sum_s d(s) (truth(s) - w.x(s))^2. Throws
/// std::invalid_argument when the weighting puts mass on a state where the
/// truth vector is undefined.
double msve(const ValueEstimate& estimate, const std::vector<double>& truth,
            const StateWeighting& weighting);

/// Same metric for a plain value vector.
double msve_values(const std::vector<double>& values, const std::vector<double>& truth,
                   const StateWeighting& weighting);

struct TrialAggregate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Sample mean with a symmetric Student-t interval at the given confidence.
/// Requires at least two values.
TrialAggregate aggregate_trials(const std::vector<double>& values,
                                double confidence = 0.95);

/// Inverse CDF of Student's t with `dof` degrees of freedom, p in (0, 1).
double student_t_quantile(double p, long dof);

}  // namespace psectd
