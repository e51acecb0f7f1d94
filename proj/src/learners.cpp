#include "psectd/learners.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "psectd/errors.hpp"

namespace psectd {

double psec_weight(const TabularPolicy& eval_policy, const EmpiricalModel& em,
                   int s, int a) {
  if (s < 0 || s >= em.n_states || a < 0 || a >= em.n_actions ||
      em.count_sa(s, a) == 0) {
    std::ostringstream os;
    os << "psec_weight: (s=" << s << ", a=" << a << ") not observed in batch";
    throw std::invalid_argument(os.str());
  }
  return eval_policy.prob(s, a) / em.pi_hat(s, a);
}

namespace {

// One presentation visits every transition once, so the accumulated update
// collapses by (state, action, next-state) counts to
//   u = X D [rew + gamma B v - sigma .* v],   v = X^T w,
// with the per-mode action weights folded into B/rew and sigma carrying the
// weight on the subtracted value term. This is the transition-loop sum
// reassociated; the tests check the two routes against each other.
struct CompressedUpdate {
  std::vector<int> states;  // visited non-terminal, canonical order
  Eigen::MatrixXd b;        // n x n, weighted next-state mass
  Eigen::VectorXd rew;      // n, weighted mean one-step reward
  Eigen::VectorXd sigma;    // n, weight on -w.x(s)
  Eigen::VectorXd d;        // n, source counts
};

CompressedUpdate build_update(const EmpiricalModel& em,
                              const TabularPolicy& eval_policy,
                              const TabularPolicy* behavior, WeightMode mode) {
  CompressedUpdate cu;
  cu.states = em.visited_nonterminal();
  const int n = static_cast<int>(cu.states.size());
  std::vector<int> dense(em.n_states, -1);
  for (int k = 0; k < n; ++k) dense[cu.states[k]] = k;

  cu.b = Eigen::MatrixXd::Zero(n, n);
  cu.rew = Eigen::VectorXd::Zero(n);
  cu.sigma = Eigen::VectorXd::Zero(n);
  cu.d = Eigen::VectorXd::Zero(n);

  const bool needs_eval = mode != WeightMode::None;
  for (int k = 0; k < n; ++k) {
    const int s = cu.states[k];
    cu.d(k) = static_cast<double>(em.d(s));
    if (needs_eval && s >= eval_policy.n_states) {
      throw std::invalid_argument(
          "fit_td0: evaluation policy does not cover visited state " +
          std::to_string(s));
    }
    for (int a = 0; a < em.n_actions; ++a) {
      if (em.count_sa(s, a) == 0) continue;
      double action_weight = 0.0;
      double value_weight = 0.0;
      switch (mode) {
        case WeightMode::None:
          action_weight = em.pi_hat(s, a);
          value_weight = em.pi_hat(s, a);
          break;
        case WeightMode::IsTrueBehavior: {
          if (behavior == nullptr) {
            throw std::invalid_argument("fit_td0: IsTrueBehavior needs a behavior policy");
          }
          const double pb = behavior->prob(s, a);
          if (pb <= 0.0) {
            std::ostringstream os;
            os << "fit_td0: behavior policy gives zero probability to observed (s="
               << s << ", a=" << a << ")";
            throw std::invalid_argument(os.str());
          }
          // rho = pi_e / pi_b multiplies the whole TD-error.
          const double rho = eval_policy.prob(s, a) / pb;
          action_weight = rho * em.pi_hat(s, a);
          value_weight = action_weight;
          break;
        }
        case WeightMode::PsecTdError:
          // rho_hat * pi_hat = pi_e on observed support.
          action_weight = eval_policy.prob(s, a);
          value_weight = action_weight;
          break;
        case WeightMode::PsecEstimate:
          // rho_hat on the bootstrap target only; the -w.x(s) term keeps
          // its plain count weight.
          action_weight = eval_policy.prob(s, a);
          value_weight = em.pi_hat(s, a);
          break;
      }
      cu.sigma(k) += value_weight;
      cu.rew(k) += action_weight * em.mean_reward_sa(s, a);
      for (int j = 0; j < em.n_states; ++j) {
        if (em.count_sas(s, a, j) == 0 || em.is_visited_terminal(j)) continue;
        cu.b(k, dense[j]) += action_weight * em.p_hat(s, a, j);
      }
    }
  }
  return cu;
}

}  // namespace

FitResult fit_td0(const Batch& batch, const FeatureMap& features,
                  const TabularPolicy& eval_policy, const TabularPolicy* behavior,
                  const LearnerConfig& config) {
  if (config.step_size <= 0.0) throw std::invalid_argument("fit_td0: step_size <= 0");
  if (config.threshold <= 0.0) throw std::invalid_argument("fit_td0: threshold <= 0");
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) {
    throw std::invalid_argument("fit_td0: gamma outside [0, 1]");
  }
  const std::size_t total = batch.total_transitions();
  if (total == 0) throw std::invalid_argument("fit_td0: batch carries no transitions");

  const EmpiricalModel em = estimate(batch, features.n_states, eval_policy.n_actions);
  const CompressedUpdate cu =
      build_update(em, eval_policy, behavior, config.weight_mode);
  const int n = static_cast<int>(cu.states.size());
  const double gamma = config.gamma;

  FitResult result;
  result.estimate.features = features;
  result.estimate.weights.assign(features.dim, 0.0);
  if (!config.init_weights.empty()) {
    if (config.init_weights.size() != static_cast<std::size_t>(features.dim)) {
      throw std::invalid_argument("fit_td0: init_weights dimension mismatch");
    }
    result.estimate.weights = config.init_weights;
  }

  const bool tabular = features.is_tabular();
  Eigen::MatrixXd x;  // dim x n, only for general feature maps
  if (!tabular) {
    x.resize(features.dim, n);
    for (int k = 0; k < n; ++k) {
      auto col = features.col(cu.states[k]);
      for (int r = 0; r < features.dim; ++r) x(r, k) = col[r];
    }
  }

  Eigen::Map<Eigen::VectorXd> w(result.estimate.weights.data(), features.dim);
  const double step_scale = 1.0 / static_cast<double>(batch.episodes.size());
  Eigen::VectorXd v(n), g(n), u(features.dim);
  double alpha = config.step_size;

  FitReport& report = result.report;
  for (long it = 0; it < config.max_presentations; ++it) {
    if (tabular) {
      for (int k = 0; k < n; ++k) v(k) = w(cu.states[k]);
    } else {
      v.noalias() = x.transpose() * w;
    }
    g = cu.d.cwiseProduct(cu.rew + gamma * (cu.b * v) - cu.sigma.cwiseProduct(v));

    const double step = alpha * step_scale;
    double delta = 0.0;
    if (tabular) {
      for (int k = 0; k < n; ++k) {
        const double dw = step * g(k);
        w(cu.states[k]) += dw;
        delta = std::max(delta, std::abs(dw));
      }
    } else {
      u.noalias() = x * g;
      w += step * u;
      delta = step * u.cwiseAbs().maxCoeff();
    }
    ++report.presentations;
    report.final_delta = delta;
    if (config.record_trace) report.delta_trace.push_back(delta);

    const double wmax = w.cwiseAbs().maxCoeff();
    if (!(wmax <= config.divergence_guard)) {
      throw DivergenceError("fit_td0: weights exceeded the divergence guard", wmax,
                            report.delta_trace);
    }
    if (delta < config.threshold) {
      report.converged = true;
      break;
    }
    if (config.decay.every > 0 && (it + 1) % config.decay.every == 0) {
      alpha *= config.decay.factor;
    }
  }
  return result;
}

}  // namespace psectd
