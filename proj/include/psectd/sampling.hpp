#pragma once

#include <cstdint>

#include "psectd/core.hpp"

namespace psectd {

/// Generates `num_episodes` episodes under `policy`. Each episode draws from
/// its own substream keyed on (seed, episode index), so the output is a pure
/// function of the arguments. Episodes end on terminal entry or after
/// max_steps transitions (then flagged truncated; the final transition is
/// recorded as non-terminal so learners keep bootstrapping from it).
Batch sample_batch(const TabularMDP& model, const TabularPolicy& policy,
                   int num_episodes, std::uint64_t seed, int max_steps = 1000);

}  // namespace psectd
