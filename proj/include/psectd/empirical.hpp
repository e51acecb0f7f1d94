#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "psectd/core.hpp"

namespace psectd {

/// Every maximum-likelihood quantity derivable from a batch by counting.
/// All estimates live on observed support only: no smoothing, no
/// pseudo-counts. Accessors return 0 outside the observed support.
struct EmpiricalModel {
  int n_states = 0;
  int n_actions = 0;

  std::vector<long> state_count;        // d_i: occurrences of i as a source
  std::vector<long> start_count;        // mu_i: occurrences of i as an episode start
  std::vector<long> sa_count;           // [s][a]
  std::vector<long> triple_count;       // [s][a][s']
  std::vector<double> sa_reward_sum;    // [s][a]
  std::vector<double> triple_reward_sum;  // [s][a][s']
  std::vector<std::uint8_t> visited;           // appeared anywhere in the batch
  std::vector<std::uint8_t> entered_terminal;  // appeared as a terminal next-state
  bool has_truncated = false;
  long episode_count = 0;

  long d(int s) const { return state_count[s]; }
  long count_sa(int s, int a) const {
    return sa_count[static_cast<std::size_t>(s) * n_actions + a];
  }
  long count_sas(int s, int a, int s2) const {
    return triple_count[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }

  /// pi_hat(a|s) = (sum_j c^a_{sj}) / d_s on observed support, else 0.
  double pi_hat(int s, int a) const {
    return state_count[s] == 0
               ? 0.0
               : static_cast<double>(count_sa(s, a)) / static_cast<double>(state_count[s]);
  }
  /// P_hat(s'|s,a) = c^a_{ss'} / sum_j c^a_{sj} on observed support, else 0.
  double p_hat(int s, int a, int s2) const {
    const long n = count_sa(s, a);
    return n == 0 ? 0.0 : static_cast<double>(count_sas(s, a, s2)) / static_cast<double>(n);
  }
  /// Mean reward observed on taking a in s.
  double mean_reward_sa(int s, int a) const {
    const long n = count_sa(s, a);
    return n == 0 ? 0.0
                  : sa_reward_sum[static_cast<std::size_t>(s) * n_actions + a] /
                        static_cast<double>(n);
  }
  /// Mean reward observed on the (s, a, s') triple.
  double mean_reward_sas(int s, int a, int s2) const {
    const long n = count_sas(s, a, s2);
    return n == 0 ? 0.0
                  : triple_reward_sum[(static_cast<std::size_t>(s) * n_actions + a) *
                                          n_states +
                                      s2] /
                        static_cast<double>(n);
  }

  bool is_visited(int s) const { return visited[s] != 0; }
  bool is_visited_terminal(int s) const { return entered_terminal[s] != 0; }

  /// Visited non-terminal states in ascending id order (the canonical matrix
  /// index order).
  std::vector<int> visited_nonterminal() const;
  std::vector<int> observed_actions(int s) const;
};

/// Single pass over the batch accumulating all counts. Episode order does not
/// matter (pure fold, commutative merges).
EmpiricalModel estimate(const Batch& batch, int n_states, int n_actions);

/// Dense matrix forms over the visited non-terminal states, in canonical
/// (ascending state id) order. Q/m/h weight actions by the MLE policy; U/o/l
/// weight them by the evaluation policy restricted to observed actions; D is
/// the diagonal of source counts and X the feature columns.
struct CEMatrixForm {
  std::vector<int> states;  // canonical order, index -> original state id
  Eigen::MatrixXd Q, U;
  Eigen::VectorXd m, h, o, l;
  Eigen::VectorXd d;
  Eigen::MatrixXd X;  // dim x |states|
  bool has_truncated = false;
  long episodes = 0;
};

/// Throws std::invalid_argument naming the state when the evaluation policy
/// does not cover a visited state.
CEMatrixForm matrix_form(const EmpiricalModel& em, const TabularPolicy& eval_policy,
                         const FeatureMap& features);

/// 1 - (observed distinct (s,a,s') triples) / (triples with positive
/// probability under policy and model).
double unvisited_fraction(const EmpiricalModel& em, const TabularMDP& model,
                          const TabularPolicy& policy);

/// True when every action with positive evaluation-policy probability has
/// been observed at least once in every state that appears as a transition
/// source. This is the condition under which the TD-error placement of the
/// correction weight shares its fixed point with the DP solution.
bool full_eval_support_observed(const EmpiricalModel& em,
                                const TabularPolicy& eval_policy);

}  // namespace psectd
