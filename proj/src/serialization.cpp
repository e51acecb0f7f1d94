#include "psectd/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "psectd/rng.hpp"

namespace psectd {

using nlohmann::json;

json mdp_to_json(const TabularMDP& model) {
  json j;
  j["type"] = "tabular_mdp";
  j["n_states"] = model.n_states;
  j["n_actions"] = model.n_actions;
  j["discount"] = model.discount;
  j["transition"] = model.transition;
  j["reward"] = model.reward;
  json terminals = json::array();
  for (int s = 0; s < model.n_states; ++s) {
    if (model.is_terminal(s)) terminals.push_back(s);
  }
  j["terminals"] = terminals;
  j["start_dist"] = model.start_dist;
  return j;
}

TabularMDP mdp_from_json(const json& j) {
  TabularMDP m;
  m.n_states = j.at("n_states").get<int>();
  m.n_actions = j.at("n_actions").get<int>();
  m.discount = j.at("discount").get<double>();
  m.transition = j.at("transition").get<std::vector<double>>();
  m.reward = j.at("reward").get<std::vector<double>>();
  m.terminal.assign(m.n_states, 0);
  for (int s : j.at("terminals").get<std::vector<int>>()) m.terminal.at(s) = 1;
  m.start_dist = j.at("start_dist").get<std::vector<double>>();
  const std::size_t table =
      static_cast<std::size_t>(m.n_states) * m.n_actions * m.n_states;
  if (m.transition.size() != table || m.reward.size() != table ||
      m.start_dist.size() != static_cast<std::size_t>(m.n_states)) {
    throw std::invalid_argument("mdp_from_json: table sizes do not match shape fields");
  }
  return m;
}

json policy_to_json(const TabularPolicy& policy) {
  json j;
  j["type"] = "tabular_policy";
  j["n_states"] = policy.n_states;
  j["n_actions"] = policy.n_actions;
  j["probs"] = policy.probs;
  return j;
}

TabularPolicy policy_from_json(const json& j) {
  TabularPolicy p;
  p.n_states = j.at("n_states").get<int>();
  p.n_actions = j.at("n_actions").get<int>();
  p.probs = j.at("probs").get<std::vector<double>>();
  if (p.probs.size() != static_cast<std::size_t>(p.n_states) * p.n_actions) {
    throw std::invalid_argument("policy_from_json: table size does not match shape fields");
  }
  return p;
}

json value_estimate_to_json(const ValueEstimate& estimate) {
  json j;
  j["type"] = "value_estimate";
  j["dim"] = estimate.features.dim;
  j["weights"] = estimate.weights;
  if (estimate.features.is_tabular()) {
    j["features"] = "tabular";
    j["n_states"] = estimate.features.n_states;
  } else {
    j["features"] = json{{"dim", estimate.features.dim},
                         {"n_states", estimate.features.n_states},
                         {"data", estimate.features.data}};
  }
  return j;
}

ValueEstimate value_estimate_from_json(const json& j) {
  ValueEstimate e;
  e.weights = j.at("weights").get<std::vector<double>>();
  if (j.at("features").is_string()) {
    e.features = FeatureMap::tabular(j.at("n_states").get<int>());
  } else {
    const auto& f = j.at("features");
    e.features.dim = f.at("dim").get<int>();
    e.features.n_states = f.at("n_states").get<int>();
    e.features.data = f.at("data").get<std::vector<double>>();
  }
  return e;
}

json fit_report_to_json(const FitReport& report) {
  json j;
  j["type"] = "fit_report";
  j["presentations"] = report.presentations;
  j["final_delta"] = report.final_delta;
  j["converged"] = report.converged;
  j["delta_trace"] = report.delta_trace;
  return j;
}

json empirical_to_json(const EmpiricalModel& em) {
  json j;
  j["type"] = "empirical_model";
  j["n_states"] = em.n_states;
  j["n_actions"] = em.n_actions;
  const auto states = em.visited_nonterminal();
  json index_map = json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    index_map.push_back({{"state", states[k]}, {"index", k}});
  }
  j["visited_nonterminal"] = index_map;
  json terminals = json::array();
  for (int s = 0; s < em.n_states; ++s) {
    if (em.is_visited_terminal(s)) terminals.push_back(s);
  }
  j["visited_terminal"] = terminals;
  j["state_count"] = em.state_count;
  j["start_count"] = em.start_count;
  j["has_truncated"] = em.has_truncated;

  json pi = json::array();
  json triples = json::array();
  for (int s : states) {
    for (int a : em.observed_actions(s)) {
      pi.push_back({{"state", s}, {"action", a}, {"prob", em.pi_hat(s, a)},
                    {"count", em.count_sa(s, a)},
                    {"mean_reward", em.mean_reward_sa(s, a)}});
      for (int s2 = 0; s2 < em.n_states; ++s2) {
        const long c = em.count_sas(s, a, s2);
        if (c == 0) continue;
        triples.push_back({{"state", s},
                           {"action", a},
                           {"next_state", s2},
                           {"count", c},
                           {"prob", em.p_hat(s, a, s2)},
                           {"mean_reward", em.mean_reward_sas(s, a, s2)}});
      }
    }
  }
  j["mle_policy"] = pi;
  j["mle_dynamics"] = triples;
  return j;
}

void write_batch_jsonl(std::ostream& os, const Batch& batch) {
  json header;
  header["type"] = "batch";
  header["rng"] = kRngVersion;
  header["seed"] = batch.seed;
  header["behavior_policy_id"] = batch.behavior_policy_id;
  header["episodes"] = batch.episodes.size();
  os << header.dump() << "\n";
  for (const Episode& e : batch.episodes) {
    json steps = json::array();
    for (const Transition& t : e.steps) {
      steps.push_back({t.state, t.action, t.reward, t.next_state, t.next_is_terminal});
    }
    json line;
    line["truncated"] = e.truncated;
    line["steps"] = steps;
    os << line.dump() << "\n";
  }
}

Batch read_batch_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("batch stream is empty");
  const json header = json::parse(line);
  if (header.value("type", "") != "batch") {
    throw std::invalid_argument("batch stream header missing type=batch");
  }
  Batch batch;
  batch.seed = header.at("seed").get<std::uint64_t>();
  batch.behavior_policy_id = header.value("behavior_policy_id", "");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Episode e;
    e.truncated = j.at("truncated").get<bool>();
    for (const auto& step : j.at("steps")) {
      e.steps.push_back({step.at(0).get<int>(), step.at(1).get<int>(),
                         step.at(2).get<double>(), step.at(3).get<int>(),
                         step.at(4).get<bool>()});
    }
    batch.episodes.push_back(std::move(e));
  }
  return batch;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  json j;
  is >> j;
  return j;
}

void save_batch(const Batch& batch, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_batch_jsonl(os, batch);
}

Batch load_batch(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_batch_jsonl(is);
}

}  // namespace psectd
