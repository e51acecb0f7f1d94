#include <doctest.h>

#include <cstring>
#include <sstream>

#include "psectd/gridworld.hpp"
#include "psectd/sampling.hpp"
#include "psectd/serialization.hpp"

using namespace psectd;

namespace {

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return a.empty() ||
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("mdp json round-trip is bit-identical") {
  // Slip 0.7 produces non-representable fractions (0.15), which is exactly
  // where a lossy printer would break.
  const TabularMDP m = build_gridworld({0.7, 0.99});
  const std::string text = mdp_to_json(m).dump();
  const TabularMDP back = mdp_from_json(nlohmann::json::parse(text));
  CHECK(back.n_states == m.n_states);
  CHECK(back.n_actions == m.n_actions);
  CHECK(back.discount == m.discount);
  CHECK(bit_identical(back.transition, m.transition));
  CHECK(bit_identical(back.reward, m.reward));
  CHECK(bit_identical(back.start_dist, m.start_dist));
  CHECK(back.terminal == m.terminal);
}

TEST_CASE("policy json round-trip is bit-identical") {
  const PolicyPair pair = gridworld_policies(PolicyMode::OffPolicy, 42);
  const std::string text = policy_to_json(pair.eval).dump();
  const TabularPolicy back = policy_from_json(nlohmann::json::parse(text));
  CHECK(bit_identical(back.probs, pair.eval.probs));
}

TEST_CASE("batch jsonl round-trip preserves every transition") {
  const TabularMDP m = build_gridworld({0.4, 1.0});
  Batch batch = sample_batch(m, TabularPolicy::uniform(16, 4), 12, 9);
  batch.behavior_policy_id = "uniform";
  std::stringstream ss;
  write_batch_jsonl(ss, batch);
  const Batch back = read_batch_jsonl(ss);
  REQUIRE(back.episodes.size() == batch.episodes.size());
  CHECK(back.seed == batch.seed);
  CHECK(back.behavior_policy_id == "uniform");
  for (std::size_t e = 0; e < batch.episodes.size(); ++e) {
    const Episode& x = batch.episodes[e];
    const Episode& y = back.episodes[e];
    REQUIRE(y.steps.size() == x.steps.size());
    CHECK(y.truncated == x.truncated);
    for (std::size_t t = 0; t < x.steps.size(); ++t) {
      CHECK(y.steps[t].state == x.steps[t].state);
      CHECK(y.steps[t].action == x.steps[t].action);
      CHECK(y.steps[t].reward == x.steps[t].reward);
      CHECK(y.steps[t].next_state == x.steps[t].next_state);
      CHECK(y.steps[t].next_is_terminal == x.steps[t].next_is_terminal);
    }
  }
}

TEST_CASE("value estimates and fit reports serialize") {
  ValueEstimate est;
  est.features = FeatureMap::tabular(4);
  est.weights = {0.1, -2.75, 1.0 / 3.0, 0.0};
  const ValueEstimate back =
      value_estimate_from_json(nlohmann::json::parse(value_estimate_to_json(est).dump()));
  CHECK(bit_identical(back.weights, est.weights));
  CHECK(back.features.is_tabular());

  FitReport report;
  report.presentations = 42;
  report.final_delta = 1e-11;
  report.converged = true;
  report.delta_trace = {0.5, 0.25, 1e-11};
  const auto j = fit_report_to_json(report);
  CHECK(j.at("presentations") == 42);
  CHECK(j.at("converged") == true);
  CHECK(j.at("delta_trace").size() == 3);
}

TEST_CASE("empirical dump carries the visited index map") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const Batch batch = sample_batch(m, TabularPolicy::uniform(16, 4), 5, 0);
  const EmpiricalModel em = estimate(batch, 16, 4);
  const auto j = empirical_to_json(em);
  CHECK(j.at("visited_nonterminal").size() == em.visited_nonterminal().size());
  // Dense indices are the canonical ascending order.
  int expected = 0;
  for (const auto& entry : j.at("visited_nonterminal")) {
    CHECK(entry.at("index") == expected++);
  }
  CHECK(!j.at("mle_policy").empty());
  CHECK(!j.at("mle_dynamics").empty());
}
