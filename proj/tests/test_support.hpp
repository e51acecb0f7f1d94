#pragma once

// Shared generators and reference implementations for the test suite. The
// reference TD presentation below is the independent oracle for the learner's
// count-compressed update: a literal transition loop, no grouping.

#include <cmath>
#include <cstdint>
#include <vector>

#include "psectd/core.hpp"
#include "psectd/empirical.hpp"
#include "psectd/learners.hpp"
#include "psectd/rng.hpp"

namespace psectd::testing {

/// Random small terminating MDP: 2-6 states, 1-3 actions, one terminal that
/// every (s, a) row reaches with at least 0.1 mass, rewards in [-1, 1].
inline TabularMDP random_small_mdp(std::uint64_t seed, double gamma = 0.95) {
  CounterRng rng(hash64({seed, 0x6d6470ULL}));
  const int n_states = 2 + int(rng.next_u64() % 5);
  const int n_actions = 1 + int(rng.next_u64() % 3);
  const int terminal = n_states - 1;

  TabularMDP m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.discount = gamma;
  const std::size_t table = std::size_t(n_states) * n_actions * n_states;
  m.transition.assign(table, 0.0);
  m.reward.assign(table, 0.0);
  m.terminal.assign(n_states, 0);
  m.terminal[terminal] = 1;
  m.start_dist.assign(n_states, 0.0);
  for (int s = 0; s < n_states - 1; ++s) m.start_dist[s] = 1.0 / (n_states - 1);

  for (int s = 0; s < n_states; ++s) {
    if (m.is_terminal(s)) continue;
    for (int a = 0; a < n_actions; ++a) {
      const std::size_t base = (std::size_t(s) * n_actions + a) * n_states;
      // Exponential draws normalized, then mixed with mass on the terminal.
      std::vector<double> raw(n_states);
      double sum = 0.0;
      for (int j = 0; j < n_states; ++j) {
        raw[j] = -std::log(rng.next_uniform_open());
        sum += raw[j];
      }
      for (int j = 0; j < n_states; ++j) {
        m.transition[base + j] = 0.9 * raw[j] / sum + (j == terminal ? 0.1 : 0.0);
        m.reward[base + j] = 2.0 * rng.next_uniform() - 1.0;
      }
    }
  }
  return m;
}

inline TabularPolicy random_policy(const TabularMDP& m, std::uint64_t seed) {
  CounterRng rng(hash64({seed, 0x706f6cULL}));
  SoftmaxParams params;
  params.n_states = m.n_states;
  params.n_actions = m.n_actions;
  params.theta.resize(std::size_t(m.n_states) * m.n_actions);
  for (double& t : params.theta) t = rng.next_gaussian();
  return softmax_policy(params);
}

/// One presentation of the batch as a bare transition loop:
///   u += [contrib] x(s),  w += (alpha / n) u.
/// Returns the updated weights.
inline std::vector<double> reference_presentation(
    const Batch& batch, const FeatureMap& features, const TabularPolicy& eval,
    const TabularPolicy* behavior, const EmpiricalModel& em, WeightMode mode,
    double alpha, double gamma, const std::vector<double>& weights) {
  const int dim = features.dim;
  std::vector<double> u(dim, 0.0);
  auto dot = [&](const std::vector<double>& w, int s) {
    auto x = features.col(s);
    double out = 0.0;
    for (int k = 0; k < dim; ++k) out += w[k] * x[k];
    return out;
  };
  for (const Episode& e : batch.episodes) {
    for (const Transition& t : e.steps) {
      const double vs = dot(weights, t.state);
      const double vn = t.next_is_terminal ? 0.0 : dot(weights, t.next_state);
      const double yhat = t.reward + gamma * vn;
      double contrib = 0.0;
      switch (mode) {
        case WeightMode::None:
          contrib = yhat - vs;
          break;
        case WeightMode::IsTrueBehavior: {
          const double rho = eval.prob(t.state, t.action) /
                             behavior->prob(t.state, t.action);
          contrib = rho * (yhat - vs);
          break;
        }
        case WeightMode::PsecTdError: {
          const double rho = eval.prob(t.state, t.action) /
                             em.pi_hat(t.state, t.action);
          contrib = rho * (yhat - vs);
          break;
        }
        case WeightMode::PsecEstimate: {
          const double rho = eval.prob(t.state, t.action) /
                             em.pi_hat(t.state, t.action);
          contrib = rho * yhat - vs;
          break;
        }
      }
      auto x = features.col(t.state);
      for (int k = 0; k < dim; ++k) u[k] += contrib * x[k];
    }
  }
  std::vector<double> out = weights;
  const double step = alpha / double(batch.episodes.size());
  for (int k = 0; k < dim; ++k) out[k] += step * u[k];
  return out;
}

}  // namespace psectd::testing
