#include "psectd/gridworld.hpp"

#include <stdexcept>

#include "psectd/rng.hpp"

namespace psectd {

namespace {

// Action order: 0 = up, 1 = right, 2 = down, 3 = left. Perpendicular
// directions of a are (a+1) % 4 and (a+3) % 4.
constexpr int kRowDelta[kGridActions] = {-1, 0, 1, 0};
constexpr int kColDelta[kGridActions] = {0, 1, 0, -1};

std::pair<int, int> move(int row, int col, int dir) {
  const int nr = row + kRowDelta[dir];
  const int nc = col + kColDelta[dir];
  if (nr < 0 || nr >= kGridSide || nc < 0 || nc >= kGridSide) return {row, col};
  return {nr, nc};
}

double reward_on_entering(int row, int col) {
  if (row == 3 && col == 3) return 100.0;
  if (row == 1 && col == 1) return -10.0;
  if (row == 1 && col == 3) return 1.0;
  return -1.0;
}

}  // namespace

TabularMDP build_gridworld(const GridworldConfig& config) {
  if (!(config.slip_p >= 0.0 && config.slip_p <= 1.0)) {
    throw std::invalid_argument("build_gridworld: slip_p outside [0, 1]");
  }
  if (!(config.discount >= 0.0 && config.discount <= 1.0)) {
    throw std::invalid_argument("build_gridworld: discount outside [0, 1]");
  }

  TabularMDP m;
  m.n_states = kGridStates;
  m.n_actions = kGridActions;
  m.discount = config.discount;
  const std::size_t table =
      static_cast<std::size_t>(kGridStates) * kGridActions * kGridStates;
  m.transition.assign(table, 0.0);
  m.reward.assign(table, 0.0);
  m.terminal.assign(kGridStates, 0);
  m.terminal[grid_cell(3, 3)] = 1;
  m.start_dist.assign(kGridStates, 0.0);
  m.start_dist[grid_cell(0, 0)] = 1.0;

  const double p = config.slip_p;
  for (int row = 0; row < kGridSide; ++row) {
    for (int col = 0; col < kGridSide; ++col) {
      const int s = grid_cell(row, col);
      if (m.is_terminal(s)) continue;
      for (int a = 0; a < kGridActions; ++a) {
        const std::size_t base =
            (static_cast<std::size_t>(s) * kGridActions + a) * kGridStates;
        const std::pair<int, double> outcomes[3] = {
            {a, p}, {(a + 1) % 4, (1.0 - p) / 2.0}, {(a + 3) % 4, (1.0 - p) / 2.0}};
        for (const auto& [dir, prob] : outcomes) {
          if (prob == 0.0) continue;
          const auto [nr, nc] = move(row, col, dir);
          const int ns = grid_cell(nr, nc);
          m.transition[base + ns] += prob;
          m.reward[base + ns] = reward_on_entering(nr, nc);
        }
      }
    }
  }
  return m;
}

PolicyPair gridworld_policies(PolicyMode mode, std::uint64_t seed) {
  PolicyPair pair;
  pair.behavior = TabularPolicy::uniform(kGridStates, kGridActions);
  if (mode == PolicyMode::OnPolicy) {
    pair.eval = pair.behavior;
    return pair;
  }
  SoftmaxParams params;
  params.n_states = kGridStates;
  params.n_actions = kGridActions;
  params.theta.resize(static_cast<std::size_t>(kGridStates) * kGridActions);
  CounterRng rng(hash64({seed, 0x706f6c696379ULL}));  // "policy" stream
  for (double& t : params.theta) t = rng.next_gaussian();
  pair.eval = softmax_policy(params);
  return pair;
}

}  // namespace psectd
