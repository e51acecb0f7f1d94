#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "psectd/gridworld.hpp"
#include "psectd/learners.hpp"
#include "psectd/metrics.hpp"
#include "psectd/oracles.hpp"
#include "psectd/rng.hpp"
#include "psectd/sampling.hpp"

using namespace psectd;

TEST_CASE("msve is zero iff the estimate matches the truth on the support") {
  const std::vector<double> truth{1.0, 2.0, 3.0, 0.0};
  ValueEstimate est;
  est.features = FeatureMap::tabular(4);
  est.weights = {1.0, 2.0, 3.0, 0.0};
  const StateWeighting w = StateWeighting::uniform_over({0, 1, 2}, 4);
  CHECK(msve(est, truth, w) == 0.0);

  est.weights[1] = 2.5;
  CHECK(msve(est, truth, w) > 0.0);
}

TEST_CASE("a constant offset under uniform weighting scores its square") {
  const std::vector<double> truth{1.0, -2.0, 0.5};
  ValueEstimate est;
  est.features = FeatureMap::tabular(3);
  est.weights = {1.0 + 0.3, -2.0 + 0.3, 0.5 + 0.3};
  const StateWeighting w = StateWeighting::uniform_over({0, 1, 2}, 3);
  CHECK(msve(est, truth, w) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("msve equals a direct summation oracle on a TD estimate") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  const Batch batch = sample_batch(m, pi, 5, 3);
  LearnerConfig cfg;
  cfg.step_size = 0.05;
  cfg.gamma = 1.0;
  cfg.record_trace = false;
  const FitResult fit = fit_td0(batch, FeatureMap::tabular(16), pi, nullptr, cfg);
  const auto truth = solve_true_values(m, pi);
  const StateWeighting w = StateWeighting::uniform_nonterminal(m);

  double direct = 0.0;
  for (int s = 0; s < 15; ++s) {
    const double gap = truth[s] - fit.estimate.value(s);
    direct += (1.0 / 15.0) * gap * gap;
  }
  CHECK(msve(fit.estimate, truth, w) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("weight mass outside the defined truth is a structured error") {
  std::vector<double> truth{1.0, std::numeric_limits<double>::quiet_NaN()};
  ValueEstimate est;
  est.features = FeatureMap::tabular(2);
  est.weights = {1.0, 1.0};
  const StateWeighting w = StateWeighting::uniform_over({0, 1}, 2);
  CHECK_THROWS_AS(msve(est, truth, w), std::invalid_argument);
}

TEST_CASE("msve is invariant to a consistent relabeling of states") {
  const std::vector<double> truth{4.0, -1.0, 2.0};
  std::vector<double> values{3.0, 0.0, 2.5};
  StateWeighting w;
  w.weights = {0.2, 0.5, 0.3};
  const double base = msve_values(values, truth, w);

  const std::vector<int> perm{2, 0, 1};
  std::vector<double> truth_p(3), values_p(3);
  StateWeighting w_p;
  w_p.weights.assign(3, 0.0);
  for (int s = 0; s < 3; ++s) {
    truth_p[perm[s]] = truth[s];
    values_p[perm[s]] = values[s];
    w_p.weights[perm[s]] = w.weights[s];
  }
  CHECK(msve_values(values_p, truth_p, w_p) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("aggregate of identical values collapses to a point") {
  const TrialAggregate a = aggregate_trials({3.5, 3.5, 3.5, 3.5}, 0.95);
  CHECK(a.mean == 3.5);
  CHECK(a.ci_low == 3.5);
  CHECK(a.ci_high == 3.5);
}

TEST_CASE("two-point aggregate is symmetric about the mean") {
  const TrialAggregate a = aggregate_trials({0.0, 2.0}, 0.95);
  CHECK(a.mean == doctest::Approx(1.0));
  CHECK(a.ci_high - a.mean == doctest::Approx(a.mean - a.ci_low).epsilon(1e-12));
  CHECK(a.ci_low < 0.0);  // t(0.975, 1) = 12.7: a wide interval
}

TEST_CASE("aggregate rejects degenerate input") {
  CHECK_THROWS_AS(aggregate_trials({1.0}, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_trials({1.0, 2.0}, 1.5), std::invalid_argument);
}

TEST_CASE("aggregate mean is permutation invariant") {
  std::vector<double> values{0.3, 1.7, -2.0, 5.5, 0.0};
  const TrialAggregate a = aggregate_trials(values, 0.9);
  std::reverse(values.begin(), values.end());
  const TrialAggregate b = aggregate_trials(values, 0.9);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-15));
  CHECK(a.ci_low == doctest::Approx(b.ci_low).epsilon(1e-12));
}

TEST_CASE("t quantiles match reference table values") {
  CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.7062047362).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 2) == doctest::Approx(4.3026527297).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 9) == doctest::Approx(2.2621571628).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 49) == doctest::Approx(2.0095752371).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 199) == doctest::Approx(1.9719565443).epsilon(1e-8));
  CHECK(student_t_quantile(0.025, 9) == doctest::Approx(-2.2621571628).epsilon(1e-8));
  CHECK(student_t_quantile(0.5, 30) == 0.0);
}

TEST_CASE("the t-interval covers the true mean at its nominal rate") {
  // 1000 meta-repeats of 200 N(3, 2) trials; count how often the 95% interval
  // contains 3. Batched counter streams keep this fully deterministic.
  const double mu = 3.0;
  const double sigma = 2.0;
  int covered = 0;
  const int repeats = 1000;
  for (int rep = 0; rep < repeats; ++rep) {
    CounterRng rng(hash64({0xc0feeULL, std::uint64_t(rep)}));
    std::vector<double> values(200);
    for (double& v : values) v = mu + sigma * rng.next_gaussian();
    const TrialAggregate a = aggregate_trials(values, 0.95);
    if (a.ci_low <= mu && mu <= a.ci_high) ++covered;
  }
  const double rate = double(covered) / repeats;
  CHECK(rate > 0.93);
  CHECK(rate < 0.97);
}
