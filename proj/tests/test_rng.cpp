#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "psectd/rng.hpp"

using namespace psectd;

TEST_CASE("hash64 is the published, frozen mixing chain") {
  // These constants are part of the reproducibility contract: per-trial seeds
  // and per-episode substreams derive from hash64, so changing it silently
  // would invalidate every committed CSV.
  CHECK(hash64({0}) == 1353023281269748473ULL);
  CHECK(hash64({1, 2, 3}) == 12647649270888443233ULL);
  CHECK(hash64({42, 10, 7}) == 1920655799929337092ULL);
}

TEST_CASE("counter streams are frozen and order-independent") {
  CounterRng a(hash64({0, 0}));
  CHECK(a.next_u64() == 16788430808072517440ULL);
  CHECK(a.next_u64() == 1952666878764390098ULL);

  // Same key, fresh instance: identical draws.
  CounterRng b(hash64({0, 0}));
  CHECK(b.next_u64() == 16788430808072517440ULL);

  // Distinct keys diverge immediately.
  CounterRng c(hash64({0, 1}));
  CHECK(c.next_u64() != 16788430808072517440ULL);
}

TEST_CASE("uniform draws stay in [0, 1) with a sane mean") {
  CounterRng rng(hash64({7}));
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("gaussian draws have unit moments") {
  CounterRng rng(hash64({11}));
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_gaussian();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum2 / n - 1.0) < 0.03);
}

TEST_CASE("categorical draw follows the probability row") {
  CounterRng rng(hash64({13}));
  const std::array<double, 4> point{0.0, 1.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(rng.next_categorical(point) == 1);

  const std::array<double, 3> probs{0.5, 0.25, 0.25};
  std::array<int, 3> counts{0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.next_categorical(probs)];
  CHECK(std::abs(counts[0] / double(n) - 0.50) < 0.01);
  CHECK(std::abs(counts[1] / double(n) - 0.25) < 0.01);
  CHECK(std::abs(counts[2] / double(n) - 0.25) < 0.01);
}
