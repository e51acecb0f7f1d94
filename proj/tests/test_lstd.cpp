#include <doctest.h>

#include <cmath>

#include "psectd/empirical.hpp"
#include "psectd/errors.hpp"
#include "psectd/gridworld.hpp"
#include "psectd/learners.hpp"
#include "psectd/lstd.hpp"
#include "psectd/oracles.hpp"
#include "psectd/sampling.hpp"

using namespace psectd;

namespace {

double gap_on_visited(const ValueEstimate& estimate, const std::vector<double>& dp,
                      const std::vector<int>& states) {
  double out = 0.0;
  for (int s : states) out = std::max(out, std::abs(estimate.value(s) - dp[s]));
  return out;
}

}  // namespace

TEST_CASE("a single terminal transition solves exactly") {
  Batch batch;
  Episode e;
  e.steps.push_back({0, 0, 2.5, 1, true});
  batch.episodes = {e};
  const ValueEstimate est = fit_lstd(batch, FeatureMap::tabular(2),
                                     TabularPolicy::uniform(2, 2), nullptr, {});
  CHECK(est.value(0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("unweighted least squares lands on the TD fixed point") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  const FeatureMap features = FeatureMap::tabular(16);
  const Batch batch = sample_batch(m, pi, 10, 0);
  const EmpiricalModel em = estimate(batch, 16, 4);

  LstdOptions options;
  options.gamma = 1.0;
  const ValueEstimate lsq = fit_lstd(batch, features, pi, nullptr, options);
  const auto dp = solve_mdp_cee(em, 1.0, 1e-13);
  CHECK(gap_on_visited(lsq, dp, em.visited_nonterminal()) < 1e-8);

  LearnerConfig cfg;
  cfg.step_size = 0.05;
  cfg.gamma = 1.0;
  cfg.record_trace = false;
  const FitResult td = fit_td0(batch, features, pi, nullptr, cfg);
  REQUIRE(td.report.converged);
  double gap = 0.0;
  for (int s : em.visited_nonterminal()) {
    gap = std::max(gap, std::abs(lsq.value(s) - td.estimate.value(s)));
  }
  CHECK(gap < 1e-6);
}

TEST_CASE("reward-weighted corrected least squares lands on the corrected CEE") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  const Batch batch = sample_batch(m, pi, 10, 5);
  const EmpiricalModel em = estimate(batch, 16, 4);

  LstdOptions options;
  options.mode = LstdWeightMode::Psec;
  options.gamma = 1.0;
  options.weight_reward = true;
  const ValueEstimate corrected =
      fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, options);
  const auto dp = solve_psec_cee(em, pi, 1.0, 1e-13);
  CHECK(gap_on_visited(corrected, dp, em.visited_nonterminal()) < 1e-6);
}

TEST_CASE("target placement matches the corrected CEE on every batch") {
  // Unlike whole-update weighting, which bends the diagonal by the observed
  // evaluation mass, the target placement reproduces the DP fixed point even
  // when some evaluation-policy actions were never sampled.
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  int partial_support = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Batch batch = sample_batch(m, pi, 4, seed);
    const EmpiricalModel em = estimate(batch, 16, 4);
    partial_support += full_eval_support_observed(em, pi) ? 0 : 1;
    LstdOptions options;
    options.mode = LstdWeightMode::Psec;
    options.gamma = 1.0;
    options.placement = LstdPlacement::Target;
    const ValueEstimate est =
        fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, options);
    const auto dp = solve_psec_cee(em, pi, 1.0, 1e-13);
    CHECK(gap_on_visited(est, dp, em.visited_nonterminal()) < 1e-8);
  }
  CHECK(partial_support > 0);  // the batches genuinely exercise partial support
}

TEST_CASE("the unweighted-reward form is a different estimator") {
  // With the importance weight on A only, the solution solves
  // (I - gamma U) v = mhat + hhat, which differs from the corrected CEE
  // whenever the MLE policy deviates from the evaluation policy.
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  const Batch batch = sample_batch(m, pi, 10, 1);
  const EmpiricalModel em = estimate(batch, 16, 4);

  LstdOptions paper_form;
  paper_form.mode = LstdWeightMode::Psec;
  paper_form.gamma = 1.0;
  const ValueEstimate est = fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr,
                                     paper_form);
  const auto dp = solve_psec_cee(em, pi, 1.0, 1e-13);
  CHECK(gap_on_visited(est, dp, em.visited_nonterminal()) > 1e-6);
}

TEST_CASE("on-policy true-behavior weighting equals the unweighted form") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  const Batch batch = sample_batch(m, pi, 5, 2);
  LstdOptions none;
  none.gamma = 1.0;
  LstdOptions is;
  is.mode = LstdWeightMode::IsTrueBehavior;
  is.gamma = 1.0;
  const ValueEstimate a = fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, none);
  const ValueEstimate b = fit_lstd(batch, FeatureMap::tabular(16), pi, &pi, is);
  CHECK(a.weights == b.weights);
}

TEST_CASE("a never-source state makes the system singular until ridged") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  // One-step episodes: the next state never appears as a source, so A has an
  // empty row/column for it at epsilon = 0.
  const Batch batch = sample_batch(m, pi, 3, 4, /*max_steps=*/1);
  bool saw_nonterminal_tail = false;
  for (const auto& e : batch.episodes) {
    saw_nonterminal_tail = saw_nonterminal_tail || !e.steps.back().next_is_terminal;
  }
  REQUIRE(saw_nonterminal_tail);

  try {
    fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, {});
    FAIL("expected SingularSystemError");
  } catch (const SingularSystemError& e) {
    CHECK(e.condition_estimate() > 1e12);
  }

  LstdOptions ridged;
  ridged.epsilon = 1e-6;
  ridged.gamma = 1.0;
  const ValueEstimate est = fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, ridged);
  for (double w : est.weights) CHECK(std::isfinite(w));
}

TEST_CASE("the solution is continuous in the ridge term") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const TabularPolicy pi = TabularPolicy::uniform(16, 4);
  const Batch batch = sample_batch(m, pi, 10, 6);

  LstdOptions base;
  base.gamma = 1.0;
  const ValueEstimate w0 = fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, base);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-6, 1e-8, 1e-10}) {
    LstdOptions opt = base;
    opt.epsilon = eps;
    const ValueEstimate w = fit_lstd(batch, FeatureMap::tabular(16), pi, nullptr, opt);
    double gap = 0.0;
    for (std::size_t k = 0; k < w.weights.size(); ++k) {
      gap = std::max(gap, std::abs(w.weights[k] - w0.weights[k]));
    }
    CHECK(gap < prev + 1e-15);
    prev = gap;
  }
  CHECK(prev < 1e-8);
}
