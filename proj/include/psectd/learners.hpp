#pragma once

#include <limits>
#include <vector>

#include "psectd/core.hpp"
#include "psectd/empirical.hpp"

namespace psectd {

/// Where (and with which distribution) the importance weight enters the
/// per-presentation update:
///   None          -- plain batch TD(0), weight 1.
///   IsTrueBehavior-- pi_e / pi_b on the TD-error (off-policy with the true
///                    behavior probabilities).
///   PsecTdError   -- pi_e / pi_hat on the TD-error.
///   PsecEstimate  -- pi_e / pi_hat on the bootstrap target only.
enum class WeightMode { None, IsTrueBehavior, PsecTdError, PsecEstimate };

struct DecaySchedule {
  double factor = 1.0;
  long every = 0;  // 0 disables decay
};

struct LearnerConfig {
  double step_size = 0.05;     // applied to the episode-averaged accumulation:
                               // w += (step_size / episode count) * u
  double threshold = 1e-10;    // stop when the max-norm weight delta drops below
  double gamma = 1.0;
  long max_presentations = 1000000;
  WeightMode weight_mode = WeightMode::None;
  DecaySchedule decay;
  std::vector<double> init_weights;  // empty = zeros
  double divergence_guard = 1e12;    // max-norm weight bound
  bool record_trace = true;
};

struct FitReport {
  long presentations = 0;
  double final_delta = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<double> delta_trace;  // per-presentation max-norm weight delta
};

struct FitResult {
  ValueEstimate estimate;
  FitReport report;
};

/// Repeated full-batch presentation until convergence. Each presentation
/// accumulates u += [rho yhat - w.x(s)] x(s) (or the TD-error placement of
/// rho, per weight_mode) over every transition, then applies one weight
/// update. `behavior` is required for IsTrueBehavior and must give positive
/// probability to every observed (s, a); the Psec modes estimate the behavior
/// policy from the batch internally. Throws DivergenceError (carrying the
/// delta trace) when the guard bound trips.
FitResult fit_td0(const Batch& batch, const FeatureMap& features,
                  const TabularPolicy& eval_policy, const TabularPolicy* behavior,
                  const LearnerConfig& config);

/// rho_hat = pi_e(a|s) / pi_hat(a|s). Precondition: (s, a) observed.
double psec_weight(const TabularPolicy& eval_policy, const EmpiricalModel& em,
                   int s, int a);

}  // namespace psectd
