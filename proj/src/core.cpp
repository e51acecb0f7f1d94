#include "psectd/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "psectd/errors.hpp"

namespace psectd {

namespace {
constexpr double kRowSumTol = 1e-12;
}

TabularPolicy TabularPolicy::uniform(int n_states, int n_actions) {
  TabularPolicy p;
  p.n_states = n_states;
  p.n_actions = n_actions;
  p.probs.assign(static_cast<std::size_t>(n_states) * n_actions,
                 1.0 / n_actions);
  return p;
}

FeatureMap FeatureMap::tabular(int n_states) {
  FeatureMap f;
  f.dim = n_states;
  f.n_states = n_states;
  f.data.assign(static_cast<std::size_t>(n_states) * n_states, 0.0);
  for (int s = 0; s < n_states; ++s) f.data[static_cast<std::size_t>(s) * n_states + s] = 1.0;
  return f;
}

bool FeatureMap::is_tabular() const {
  if (dim != n_states) return false;
  for (int s = 0; s < n_states; ++s) {
    auto x = col(s);
    for (int k = 0; k < dim; ++k) {
      if (x[k] != (k == s ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

std::vector<std::string> validate_mdp(const TabularMDP& model) {
  std::vector<std::string> report;
  auto flag = [&report](const std::string& msg) { report.push_back(msg); };

  if (model.n_states <= 0 || model.n_actions <= 0) {
    flag("n_states and n_actions must be positive");
    return report;
  }
  const std::size_t table =
      static_cast<std::size_t>(model.n_states) * model.n_actions * model.n_states;
  if (model.transition.size() != table || model.reward.size() != table ||
      model.terminal.size() != static_cast<std::size_t>(model.n_states) ||
      model.start_dist.size() != static_cast<std::size_t>(model.n_states)) {
    flag("table sizes do not match n_states/n_actions");
    return report;
  }

  if (!(model.discount >= 0.0 && model.discount <= 1.0)) {
    std::ostringstream os;
    os << "discount " << model.discount << " outside [0, 1]";
    flag(os.str());
  }

  for (int s = 0; s < model.n_states; ++s) {
    for (int a = 0; a < model.n_actions; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < model.n_states; ++s2) {
        const double p = model.p(s, a, s2);
        if (p < 0.0 || p > 1.0) {
          std::ostringstream os;
          os << "P(" << s2 << "|" << s << "," << a << ") = " << p
             << " outside [0, 1]";
          flag(os.str());
        }
        if (!std::isfinite(model.r(s, a, s2))) {
          std::ostringstream os;
          os << "R(" << s << "," << a << "," << s2 << ") not finite";
          flag(os.str());
        }
        sum += p;
      }
      if (model.is_terminal(s)) {
        if (sum != 0.0) {
          std::ostringstream os;
          os << "terminal state " << s << " has outgoing transition mass for action " << a;
          flag(os.str());
        }
      } else if (std::abs(sum - 1.0) > kRowSumTol) {
        std::ostringstream os;
        os << "transition row (s=" << s << ", a=" << a << ") sums to " << sum
           << " (deficit " << 1.0 - sum << ")";
        flag(os.str());
      }
    }
  }

  double start_sum = 0.0;
  for (int s = 0; s < model.n_states; ++s) {
    const double p = model.start_dist[s];
    if (p < 0.0 || p > 1.0) {
      std::ostringstream os;
      os << "start_dist[" << s << "] = " << p << " outside [0, 1]";
      flag(os.str());
    }
    start_sum += p;
  }
  if (std::abs(start_sum - 1.0) > kRowSumTol) {
    std::ostringstream os;
    os << "start distribution sums to " << start_sum;
    flag(os.str());
  }
  return report;
}

std::vector<std::string> validate_policy(const TabularPolicy& policy) {
  std::vector<std::string> report;
  if (policy.n_states <= 0 || policy.n_actions <= 0 ||
      policy.probs.size() !=
          static_cast<std::size_t>(policy.n_states) * policy.n_actions) {
    report.push_back("policy table size mismatch");
    return report;
  }
  for (int s = 0; s < policy.n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < policy.n_actions; ++a) {
      const double p = policy.prob(s, a);
      if (p < 0.0) {
        std::ostringstream os;
        os << "pi(" << a << "|" << s << ") = " << p << " negative";
        report.push_back(os.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      std::ostringstream os;
      os << "policy row " << s << " sums to " << sum;
      report.push_back(os.str());
    }
  }
  return report;
}

TabularPolicy softmax_policy(const SoftmaxParams& params) {
  if (params.n_states <= 0 || params.n_actions <= 0 ||
      params.theta.size() !=
          static_cast<std::size_t>(params.n_states) * params.n_actions) {
    throw std::invalid_argument("softmax_policy: theta table size mismatch");
  }
  for (double t : params.theta) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("softmax_policy: non-finite preference");
    }
  }
  TabularPolicy out;
  out.n_states = params.n_states;
  out.n_actions = params.n_actions;
  out.probs.resize(params.theta.size());
  for (int s = 0; s < params.n_states; ++s) {
    const std::size_t base = static_cast<std::size_t>(s) * params.n_actions;
    double mx = params.theta[base];
    for (int a = 1; a < params.n_actions; ++a) mx = std::max(mx, params.theta[base + a]);
    double sum = 0.0;
    for (int a = 0; a < params.n_actions; ++a) {
      out.probs[base + a] = std::exp(params.theta[base + a] - mx);
      sum += out.probs[base + a];
    }
    for (int a = 0; a < params.n_actions; ++a) out.probs[base + a] /= sum;
  }
  return out;
}

namespace {

// Chain adjacency under the policy: edge i -> j iff sum_a pi(a|i) P(j|i,a) > 0.
std::vector<std::vector<int>> chain_edges(const TabularMDP& model,
                                          const TabularPolicy& policy) {
  std::vector<std::vector<int>> out(model.n_states);
  for (int s = 0; s < model.n_states; ++s) {
    if (model.is_terminal(s)) continue;
    for (int j = 0; j < model.n_states; ++j) {
      double mass = 0.0;
      for (int a = 0; a < model.n_actions; ++a) {
        mass += policy.prob(s, a) * model.p(s, a, j);
      }
      if (mass > 0.0) out[s].push_back(j);
    }
  }
  return out;
}

std::vector<std::uint8_t> reachable_from(const std::vector<std::vector<int>>& edges,
                                         const std::vector<int>& sources) {
  std::vector<std::uint8_t> seen(edges.size(), 0);
  std::deque<int> queue;
  for (int s : sources) {
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int j : edges[s]) {
      if (!seen[j]) {
        seen[j] = 1;
        queue.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

bool certifies_termination(const TabularMDP& model, const TabularPolicy& policy) {
  const auto edges = chain_edges(model, policy);

  std::vector<int> starts;
  for (int s = 0; s < model.n_states; ++s) {
    if (model.start_dist[s] > 0.0) starts.push_back(s);
  }
  const auto forward = reachable_from(edges, starts);

  // Reverse reachability from terminals.
  std::vector<std::vector<int>> rev(model.n_states);
  for (int s = 0; s < model.n_states; ++s) {
    for (int j : edges[s]) rev[j].push_back(s);
  }
  std::vector<int> terminals;
  for (int s = 0; s < model.n_states; ++s) {
    if (model.is_terminal(s)) terminals.push_back(s);
  }
  if (terminals.empty()) return false;
  const auto can_terminate = reachable_from(rev, terminals);

  // In a finite chain, absorption is almost sure iff every reachable state
  // has a positive-probability path to a terminal.
  for (int s = 0; s < model.n_states; ++s) {
    if (forward[s] && !model.is_terminal(s) && !can_terminate[s]) return false;
  }
  return true;
}

std::vector<double> solve_true_values(const TabularMDP& model,
                                      const TabularPolicy& policy,
                                      double tol, long max_iterations) {
  {
    auto report = validate_mdp(model);
    if (!report.empty()) {
      throw std::invalid_argument("solve_true_values: invalid model: " + report.front());
    }
  }
  if (policy.n_states != model.n_states || policy.n_actions != model.n_actions) {
    throw std::invalid_argument("solve_true_values: policy shape mismatch");
  }
  if (model.discount >= 1.0 && !certifies_termination(model, policy)) {
    throw std::invalid_argument(
        "solve_true_values: gamma = 1 requires certified termination under the policy");
  }

  const double gamma = model.discount;
  std::vector<double> v(model.n_states, 0.0);
  std::vector<double> next(model.n_states, 0.0);
  double residual = 0.0;
  for (long it = 0; it < max_iterations; ++it) {
    residual = 0.0;
    for (int s = 0; s < model.n_states; ++s) {
      if (model.is_terminal(s)) {
        next[s] = 0.0;
        continue;
      }
      double acc = 0.0;
      for (int a = 0; a < model.n_actions; ++a) {
        const double pa = policy.prob(s, a);
        if (pa == 0.0) continue;
        auto row = model.transition_row(s, a);
        double inner = 0.0;
        for (int j = 0; j < model.n_states; ++j) {
          if (row[j] == 0.0) continue;
          inner += row[j] * (model.r(s, a, j) +
                             (model.is_terminal(j) ? 0.0 : gamma * v[j]));
        }
        acc += pa * inner;
      }
      next[s] = acc;
      residual = std::max(residual, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (residual < tol) return v;
  }
  throw DivergenceError("solve_true_values: no convergence within iteration cap",
                        residual);
}

}  // namespace psectd
