#include "psectd/lstd.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "psectd/empirical.hpp"
#include "psectd/errors.hpp"

namespace psectd {

namespace {
constexpr double kConditionLimit = 1e12;
}

ValueEstimate fit_lstd(const Batch& batch, const FeatureMap& features,
                       const TabularPolicy& eval_policy,
                       const TabularPolicy* behavior, const LstdOptions& options) {
  if (options.epsilon < 0.0) throw std::invalid_argument("fit_lstd: epsilon < 0");
  if (batch.total_transitions() == 0) {
    throw std::invalid_argument("fit_lstd: batch carries no transitions");
  }

  EmpiricalModel em;
  if (options.mode == LstdWeightMode::Psec) {
    em = estimate(batch, features.n_states, eval_policy.n_actions);
  }
  auto rho_of = [&](const Transition& t) -> double {
    switch (options.mode) {
      case LstdWeightMode::None:
        return 1.0;
      case LstdWeightMode::IsTrueBehavior: {
        if (behavior == nullptr) {
          throw std::invalid_argument("fit_lstd: IsTrueBehavior needs a behavior policy");
        }
        const double pb = behavior->prob(t.state, t.action);
        if (pb <= 0.0) {
          std::ostringstream os;
          os << "fit_lstd: behavior policy gives zero probability to observed (s="
             << t.state << ", a=" << t.action << ")";
          throw std::invalid_argument(os.str());
        }
        return eval_policy.prob(t.state, t.action) / pb;
      }
      case LstdWeightMode::Psec:
        return eval_policy.prob(t.state, t.action) / em.pi_hat(t.state, t.action);
    }
    return 1.0;
  };

  const int dim = features.dim;
  const double gamma = options.gamma;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  const bool tabular = features.is_tabular();

  const bool target_only = options.placement == LstdPlacement::Target;
  for (const Episode& episode : batch.episodes) {
    for (const Transition& t : episode.steps) {
      const double rho = rho_of(t);
      // Target placement weights the bootstrap column and the reward; update
      // placement weights the whole outer product and (optionally) the reward.
      const double self_weight = target_only ? 1.0 : rho;
      const double next_weight = rho;
      const double reward_weight =
          target_only || options.weight_reward ? rho : 1.0;
      if (tabular) {
        a(t.state, t.state) += self_weight;
        if (!t.next_is_terminal) a(t.state, t.next_state) -= next_weight * gamma;
        b(t.state) += reward_weight * t.reward;
      } else {
        auto xs = features.col(t.state);
        const Eigen::Map<const Eigen::VectorXd> x(xs.data(), dim);
        if (t.next_is_terminal) {
          a.noalias() += self_weight * x * x.transpose();
        } else {
          auto xn = features.col(t.next_state);
          const Eigen::Map<const Eigen::VectorXd> xp(xn.data(), dim);
          a.noalias() += x * (self_weight * x - next_weight * gamma * xp).transpose();
        }
        b.noalias() += reward_weight * t.reward * x;
      }
    }
  }

  ValueEstimate estimate;
  estimate.features = features;
  estimate.weights.assign(dim, 0.0);

  if (options.epsilon == 0.0) {
    // Coordinates the batch never touches (zero row, zero column, zero b)
    // are unconstrained; drop them and solve the reduced system. A state
    // that appears only as a successor keeps a nonzero column but a zero
    // row, which leaves the reduced system genuinely singular.
    std::vector<int> active;
    for (int k = 0; k < dim; ++k) {
      const bool touched = b(k) != 0.0 || a.row(k).cwiseAbs().sum() != 0.0 ||
                           a.col(k).cwiseAbs().sum() != 0.0;
      if (touched) active.push_back(k);
    }
    if (active.empty()) {
      throw SingularSystemError("fit_lstd: the batch spans no feature coordinate",
                                std::numeric_limits<double>::infinity());
    }
    const int na = static_cast<int>(active.size());
    Eigen::MatrixXd ar(na, na);
    Eigen::VectorXd br(na);
    for (int i = 0; i < na; ++i) {
      br(i) = b(active[i]);
      for (int j = 0; j < na; ++j) ar(i, j) = a(active[i], active[j]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ar);
    const double smin = svd.singularValues()(na - 1);
    const double cond = smin > 0.0 ? svd.singularValues()(0) / smin
                                   : std::numeric_limits<double>::infinity();
    if (!(cond < kConditionLimit)) {
      throw SingularSystemError("fit_lstd: singular system at epsilon = 0", cond);
    }
    const Eigen::VectorXd wr = ar.partialPivLu().solve(br);
    for (int i = 0; i < na; ++i) estimate.weights[active[i]] = wr(i);
    return estimate;
  }

  const Eigen::MatrixXd system =
      a + options.epsilon * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::VectorXd w = system.partialPivLu().solve(b);
  estimate.weights.assign(w.data(), w.data() + dim);
  return estimate;
}

}  // namespace psectd
