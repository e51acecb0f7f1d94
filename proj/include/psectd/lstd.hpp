#pragma once

#include "psectd/core.hpp"

namespace psectd {

enum class LstdWeightMode { None, IsTrueBehavior, Psec };

/// Where the importance weight enters the accumulation, mirroring the two
/// TD placements:
///   Update -- rho multiplies the whole x(s)(x(s) - gamma x(s'))^T term (the
///             reference listing; the reward vector stays unweighted unless
///             weight_reward is set).
///   Target -- rho multiplies the bootstrap target only:
///             A = sum x(s)(x(s) - gamma rho x(s'))^T, b = sum rho R x(s).
///             This is the variant whose solution is the corrected DP fixed
///             point on every batch, observed support notwithstanding.
enum class LstdPlacement { Update, Target };

struct LstdOptions {
  LstdWeightMode mode = LstdWeightMode::None;
  double epsilon = 0.0;
  double gamma = 1.0;
  LstdPlacement placement = LstdPlacement::Update;
  /// Update placement only: also apply the importance weight to the reward
  /// term (the symmetric estimator).
  bool weight_reward = false;
};

/// Least-squares TD(0): accumulates
///   A = sum rho x(s) (x(s) - gamma x(s'))^T,   b = sum R(s,a,s') x(s)
/// over the batch (x(s') = 0 on terminal entry) and solves (A + eps I) w = b
/// by partial-pivot LU. With eps = 0 a condition estimate above 1e12 raises
/// SingularSystemError instead of returning garbage.
ValueEstimate fit_lstd(const Batch& batch, const FeatureMap& features,
                       const TabularPolicy& eval_policy,
                       const TabularPolicy* behavior, const LstdOptions& options);

}  // namespace psectd
