#include <doctest.h>

#include <cmath>

#include "psectd/core.hpp"
#include "psectd/gridworld.hpp"

using namespace psectd;

namespace {

// Independent statement of the reward layout, used as the oracle for the
// full 16x4x16 enumeration below.
double expected_reward(int entered) {
  if (entered == grid_cell(3, 3)) return 100.0;
  if (entered == grid_cell(1, 1)) return -10.0;
  if (entered == grid_cell(1, 3)) return 1.0;
  return -1.0;
}

}  // namespace

TEST_CASE("deterministic gridworld moves where told") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  // Interior cell (1, 2): all four neighbors exist.
  const int s = grid_cell(1, 2);
  CHECK(m.p(s, 0, grid_cell(0, 2)) == 1.0);  // up
  CHECK(m.p(s, 1, grid_cell(1, 3)) == 1.0);  // right
  CHECK(m.p(s, 2, grid_cell(2, 2)) == 1.0);  // down
  CHECK(m.p(s, 3, grid_cell(1, 1)) == 1.0);  // left
}

TEST_CASE("slip splits mass between the perpendicular directions") {
  const TabularMDP m = build_gridworld({0.5, 1.0});
  const int s = grid_cell(1, 2);
  // Intended up with 0.5, right/left with 0.25 each.
  CHECK(m.p(s, 0, grid_cell(0, 2)) == doctest::Approx(0.5));
  CHECK(m.p(s, 0, grid_cell(1, 3)) == doctest::Approx(0.25));
  CHECK(m.p(s, 0, grid_cell(1, 1)) == doctest::Approx(0.25));
}

TEST_CASE("wall bumps keep the agent in place") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  const int corner = grid_cell(0, 0);
  CHECK(m.p(corner, 0, corner) == 1.0);  // up into the wall
  CHECK(m.p(corner, 3, corner) == 1.0);  // left into the wall
}

TEST_CASE("transition rows are stochastic for every slip level") {
  for (double p : {0.0, 0.3, 0.7, 1.0}) {
    const TabularMDP m = build_gridworld({p, 1.0});
    CHECK(validate_mdp(m).empty());
  }
}

TEST_CASE("reward depends only on the entered cell") {
  for (double p : {1.0, 0.4}) {
    const TabularMDP m = build_gridworld({p, 1.0});
    for (int s = 0; s < 16; ++s) {
      for (int a = 0; a < 4; ++a) {
        for (int j = 0; j < 16; ++j) {
          if (m.p(s, a, j) > 0.0) {
            CHECK(m.r(s, a, j) == expected_reward(j));
          }
        }
      }
    }
  }
}

TEST_CASE("start is a point mass on (0,0) and (3,3) is the only terminal") {
  const TabularMDP m = build_gridworld({1.0, 1.0});
  CHECK(m.start_dist[grid_cell(0, 0)] == 1.0);
  int terminals = 0;
  for (int s = 0; s < 16; ++s) terminals += m.is_terminal(s) ? 1 : 0;
  CHECK(terminals == 1);
  CHECK(m.is_terminal(grid_cell(3, 3)));
}

TEST_CASE("uniform policy certifies termination for positive slip") {
  for (double p : {0.1, 0.5, 1.0}) {
    const TabularMDP m = build_gridworld({p, 1.0});
    CHECK(certifies_termination(m, TabularPolicy::uniform(16, 4)));
  }
}

TEST_CASE("on-policy mode returns two equiprobable policies") {
  const PolicyPair pair = gridworld_policies(PolicyMode::OnPolicy, 0);
  for (int s = 0; s < 16; ++s) {
    for (int a = 0; a < 4; ++a) {
      CHECK(pair.eval.prob(s, a) == doctest::Approx(0.25));
      CHECK(pair.behavior.prob(s, a) == doctest::Approx(0.25));
    }
  }
}

TEST_CASE("off-policy mode keeps uniform behavior and a full-support softmax eval") {
  const PolicyPair pair = gridworld_policies(PolicyMode::OffPolicy, 1234);
  for (int s = 0; s < 16; ++s) {
    double sum = 0.0;
    for (int a = 0; a < 4; ++a) {
      CHECK(pair.behavior.prob(s, a) == doctest::Approx(0.25));
      CHECK(pair.eval.prob(s, a) > 0.0);
      sum += pair.eval.prob(s, a);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  // Fixed seed -> fixed policy.
  const PolicyPair again = gridworld_policies(PolicyMode::OffPolicy, 1234);
  CHECK(pair.eval.probs == again.eval.probs);
  const PolicyPair other = gridworld_policies(PolicyMode::OffPolicy, 77);
  CHECK(pair.eval.probs != other.eval.probs);
}
