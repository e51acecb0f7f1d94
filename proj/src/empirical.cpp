#include "psectd/empirical.hpp"

#include <sstream>
#include <stdexcept>

namespace psectd {

std::vector<int> EmpiricalModel::visited_nonterminal() const {
  std::vector<int> out;
  for (int s = 0; s < n_states; ++s) {
    if (visited[s] && !entered_terminal[s]) out.push_back(s);
  }
  return out;
}

std::vector<int> EmpiricalModel::observed_actions(int s) const {
  std::vector<int> out;
  for (int a = 0; a < n_actions; ++a) {
    if (count_sa(s, a) > 0) out.push_back(a);
  }
  return out;
}

EmpiricalModel estimate(const Batch& batch, int n_states, int n_actions) {
  if (batch.episodes.empty()) {
    throw std::invalid_argument("estimate: empty batch");
  }
  EmpiricalModel em;
  em.n_states = n_states;
  em.n_actions = n_actions;
  em.state_count.assign(n_states, 0);
  em.start_count.assign(n_states, 0);
  const std::size_t sa = static_cast<std::size_t>(n_states) * n_actions;
  em.sa_count.assign(sa, 0);
  em.sa_reward_sum.assign(sa, 0.0);
  em.triple_count.assign(sa * n_states, 0);
  em.triple_reward_sum.assign(sa * n_states, 0.0);
  em.visited.assign(n_states, 0);
  em.entered_terminal.assign(n_states, 0);
  em.episode_count = static_cast<long>(batch.episodes.size());

  for (const Episode& episode : batch.episodes) {
    em.has_truncated = em.has_truncated || episode.truncated;
    if (!episode.steps.empty()) {
      ++em.start_count[episode.steps.front().state];
    }
    for (const Transition& t : episode.steps) {
      if (t.state < 0 || t.state >= n_states || t.next_state < 0 ||
          t.next_state >= n_states || t.action < 0 || t.action >= n_actions) {
        std::ostringstream os;
        os << "estimate: transition (" << t.state << ", " << t.action << ", "
           << t.next_state << ") outside the declared " << n_states << "x"
           << n_actions << " space";
        throw std::invalid_argument(os.str());
      }
      const std::size_t sa_idx = static_cast<std::size_t>(t.state) * n_actions + t.action;
      const std::size_t tri_idx = sa_idx * n_states + t.next_state;
      ++em.state_count[t.state];
      ++em.sa_count[sa_idx];
      ++em.triple_count[tri_idx];
      em.sa_reward_sum[sa_idx] += t.reward;
      em.triple_reward_sum[tri_idx] += t.reward;
      em.visited[t.state] = 1;
      em.visited[t.next_state] = 1;
      if (t.next_is_terminal) em.entered_terminal[t.next_state] = 1;
    }
  }
  return em;
}

CEMatrixForm matrix_form(const EmpiricalModel& em, const TabularPolicy& eval_policy,
                         const FeatureMap& features) {
  CEMatrixForm mf;
  mf.states = em.visited_nonterminal();
  mf.has_truncated = em.has_truncated;
  mf.episodes = em.episode_count;
  const int n = static_cast<int>(mf.states.size());

  std::vector<int> dense_index(em.n_states, -1);
  for (int k = 0; k < n; ++k) dense_index[mf.states[k]] = k;

  for (int s : mf.states) {
    if (s >= eval_policy.n_states) {
      std::ostringstream os;
      os << "matrix_form: evaluation policy does not cover visited state " << s;
      throw std::invalid_argument(os.str());
    }
  }
  if (features.n_states < em.n_states) {
    throw std::invalid_argument("matrix_form: feature map does not cover the state space");
  }

  mf.Q = Eigen::MatrixXd::Zero(n, n);
  mf.U = Eigen::MatrixXd::Zero(n, n);
  mf.m = Eigen::VectorXd::Zero(n);
  mf.h = Eigen::VectorXd::Zero(n);
  mf.o = Eigen::VectorXd::Zero(n);
  mf.l = Eigen::VectorXd::Zero(n);
  mf.d = Eigen::VectorXd::Zero(n);
  mf.X = Eigen::MatrixXd::Zero(features.dim, n);

  for (int k = 0; k < n; ++k) {
    const int s = mf.states[k];
    mf.d(k) = static_cast<double>(em.d(s));
    auto x = features.col(s);
    for (int r = 0; r < features.dim; ++r) mf.X(r, k) = x[r];
    for (int a = 0; a < em.n_actions; ++a) {
      if (em.count_sa(s, a) == 0) continue;
      const double w_mle = em.pi_hat(s, a);
      const double w_eval = eval_policy.prob(s, a);
      for (int j = 0; j < em.n_states; ++j) {
        const long c = em.count_sas(s, a, j);
        if (c == 0) continue;
        const double p = em.p_hat(s, a, j);
        const double rbar = em.mean_reward_sas(s, a, j);
        if (em.is_visited_terminal(j)) {
          mf.h(k) += w_mle * p * rbar;
          mf.l(k) += w_eval * p * rbar;
        } else {
          mf.m(k) += w_mle * p * rbar;
          mf.o(k) += w_eval * p * rbar;
          const int kj = dense_index[j];
          mf.Q(k, kj) += w_mle * p;
          mf.U(k, kj) += w_eval * p;
        }
      }
    }
  }
  return mf;
}

double unvisited_fraction(const EmpiricalModel& em, const TabularMDP& model,
                          const TabularPolicy& policy) {
  long total = 0;
  long observed = 0;
  for (int s = 0; s < model.n_states; ++s) {
    if (model.is_terminal(s)) continue;
    for (int a = 0; a < model.n_actions; ++a) {
      if (policy.prob(s, a) <= 0.0) continue;
      for (int j = 0; j < model.n_states; ++j) {
        if (model.p(s, a, j) <= 0.0) continue;
        ++total;
        if (em.count_sas(s, a, j) > 0) ++observed;
      }
    }
  }
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(observed) / static_cast<double>(total);
}

bool full_eval_support_observed(const EmpiricalModel& em,
                                const TabularPolicy& eval_policy) {
  for (int s = 0; s < em.n_states; ++s) {
    if (em.d(s) == 0) continue;
    for (int a = 0; a < em.n_actions; ++a) {
      if (eval_policy.prob(s, a) > 0.0 && em.count_sa(s, a) == 0) return false;
    }
  }
  return true;
}

}  // namespace psectd
