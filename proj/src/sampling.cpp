#include "psectd/sampling.hpp"

#include <stdexcept>

#include "psectd/rng.hpp"

namespace psectd {

Batch sample_batch(const TabularMDP& model, const TabularPolicy& policy,
                   int num_episodes, std::uint64_t seed, int max_steps) {
  if (num_episodes < 1) throw std::invalid_argument("sample_batch: num_episodes < 1");
  if (max_steps < 1) throw std::invalid_argument("sample_batch: max_steps < 1");
  if (policy.n_states != model.n_states || policy.n_actions != model.n_actions) {
    throw std::invalid_argument("sample_batch: policy shape mismatch");
  }

  Batch batch;
  batch.seed = seed;
  batch.episodes.resize(num_episodes);
  for (int e = 0; e < num_episodes; ++e) {
    CounterRng rng(hash64({seed, static_cast<std::uint64_t>(e)}));
    Episode& episode = batch.episodes[e];
    int s = rng.next_categorical(model.start_dist);
    for (int step = 0; step < max_steps; ++step) {
      if (model.is_terminal(s)) break;  // start mass on a terminal: empty episode
      const int a = rng.next_categorical(policy.row(s));
      const int s2 = rng.next_categorical(model.transition_row(s, a));
      const bool term = model.is_terminal(s2);
      episode.steps.push_back({s, a, model.r(s, a, s2), s2, term});
      s = s2;
      if (term) break;
    }
    episode.truncated = !episode.steps.empty() && !episode.steps.back().next_is_terminal;
  }
  return batch;
}

}  // namespace psectd
