#pragma once

#include <cstdint>
#include <utility>

#include "psectd/core.hpp"

namespace psectd {

/// 4x4 navigation task. With probability slip_p the intended move is taken,
/// otherwise one of the two perpendicular moves with probability
/// (1 - slip_p)/2 each. Moves into a wall leave the position unchanged.
struct GridworldConfig {
  double slip_p = 1.0;
  double discount = 1.0;
};

inline constexpr int kGridSide = 4;
inline constexpr int kGridStates = kGridSide * kGridSide;
inline constexpr int kGridActions = 4;  // up, right, down, left

constexpr int grid_cell(int row, int col) { return row * kGridSide + col; }

/// Builds the 16-state / 4-action model: start at (0,0); (3,3) is terminal;
/// reward on entering a cell is +100 at (3,3), -10 at (1,1), +1 at (1,3),
/// -1 everywhere else.
TabularMDP build_gridworld(const GridworldConfig& config);

enum class PolicyMode { OnPolicy, OffPolicy };

struct PolicyPair {
  TabularPolicy eval;
  TabularPolicy behavior;
};

/// On-policy: both policies equiprobable over the four directions.
/// Off-policy: behavior equiprobable, evaluation a softmax of i.i.d. standard
/// normal preferences drawn from `seed`.
PolicyPair gridworld_policies(PolicyMode mode, std::uint64_t seed);

}  // namespace psectd
