#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace psectd {

/// Complete tabular environment model. Tables are dense and row-major:
/// transition[(s * n_actions + a) * n_states + s2] = P(s2 | s, a).
/// Terminal states generate no transitions; their rows are all zero and
/// episodes end on entry.
struct TabularMDP {
  int n_states = 0;
  int n_actions = 0;
  double discount = 1.0;
  std::vector<double> transition;  // [s][a][s'], row-major
  std::vector<double> reward;      // [s][a][s'], row-major
  std::vector<std::uint8_t> terminal;
  std::vector<double> start_dist;

  double p(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double r(int s, int a, int s2) const {
    return reward[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  bool is_terminal(int s) const { return terminal[s] != 0; }

  std::span<const double> transition_row(int s, int a) const {
    return {transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
            static_cast<std::size_t>(n_states)};
  }
};

/// Per-state action distribution, row-major [s][a].
struct TabularPolicy {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;

  double prob(int s, int a) const {
    return probs[static_cast<std::size_t>(s) * n_actions + a];
  }
  std::span<const double> row(int s) const {
    return {probs.data() + static_cast<std::size_t>(s) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }

  static TabularPolicy uniform(int n_states, int n_actions);
};

/// Preference table for softmax action selection, row-major [s][a].
struct SoftmaxParams {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> theta;
};

struct Transition {
  int state;
  int action;
  double reward;
  int next_state;
  bool next_is_terminal;
};

struct Episode {
  std::vector<Transition> steps;
  bool truncated = false;  // ended by step cap, not by terminal entry
};

struct Batch {
  std::vector<Episode> episodes;
  std::uint64_t seed = 0;
  std::string behavior_policy_id;

  std::size_t total_transitions() const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.steps.size();
    return n;
  }
};

/// One feature column x(s) per state, column-major storage (column s is
/// contiguous). Tabular (one-hot) features are the special case dim ==
/// n_states with x(s) = e_s.
struct FeatureMap {
  int dim = 0;
  int n_states = 0;
  std::vector<double> data;  // data[s * dim + k]

  std::span<const double> col(int s) const {
    return {data.data() + static_cast<std::size_t>(s) * dim,
            static_cast<std::size_t>(dim)};
  }

  static FeatureMap tabular(int n_states);
  bool is_tabular() const;
};

/// Linear value estimate v(s) = w . x(s). Terminal states evaluate to 0 by
/// construction (learners never bootstrap from them and their one-hot weights
/// are never updated); callers evaluating arbitrary feature maps should not
/// query terminals.
struct ValueEstimate {
  std::vector<double> weights;
  FeatureMap features;

  double value(int s) const {
    auto x = features.col(s);
    double v = 0.0;
    for (int k = 0; k < features.dim; ++k) v += weights[k] * x[k];
    return v;
  }
};

/// Checks every structural invariant of a model and returns one message per
/// violation; an empty report means the model is well-formed.
std::vector<std::string> validate_mdp(const TabularMDP& model);

std::vector<std::string> validate_policy(const TabularPolicy& policy);

/// Row-wise softmax with max-subtraction. Throws std::invalid_argument on
/// non-finite preferences.
TabularPolicy softmax_policy(const SoftmaxParams& params);

/// True when, under `policy`, every state reachable from the start
/// distribution reaches a terminal state with probability 1. This is the
/// certificate required to evaluate undiscounted models.
bool certifies_termination(const TabularMDP& model, const TabularPolicy& policy);

/// Exact policy evaluation on the true model by fixed-point sweeps
/// v(i) = sum_a pi(a|i) sum_j P(j|i,a) [R(i,a,j) + gamma v(j)], terminals
/// pinned to 0. Stops when the Bellman residual drops below `tol` in
/// max-norm. Throws DivergenceError if the cap is exhausted and
/// std::invalid_argument when gamma == 1 without a termination certificate.
std::vector<double> solve_true_values(const TabularMDP& model,
                                      const TabularPolicy& policy,
                                      double tol = 1e-12,
                                      long max_iterations = 1000000);

}  // namespace psectd
