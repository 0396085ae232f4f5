#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zsim/analytic.hpp"

using namespace zsim;

namespace {

// Closed-form gambler's-ruin absorption at 0 from state 1 with down
// probability q, absorbing barriers at 0 and cap.
double ruin_from_one(double q, std::uint32_t cap) {
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  const double r = q / (1.0 - q);
  if (std::abs(r - 1.0) < 1e-12) return 1.0 - 1.0 / static_cast<double>(cap);
  return (r - std::pow(r, static_cast<double>(cap))) / (1.0 - std::pow(r, static_cast<double>(cap)));
}

}  // namespace

TEST_CASE("degenerate defeat probabilities") {
  for (const ChainKernel kernel : {ChainKernel::SingleEvent, ChainKernel::PerZombieWave}) {
    CHECK(extinction_probability({0.0, 5, kernel}).extinction_probability == 0.0);
    CHECK(extinction_probability({1.0, 5, kernel}).extinction_probability == 1.0);
  }
}

TEST_CASE("fair single-event chain is the classic gambler's ruin") {
  const ExtinctionResult r = extinction_probability({0.5, 5, ChainKernel::SingleEvent});
  CHECK_THAT(r.extinction_probability, Catch::Matchers::WithinAbs(0.8, 1e-12));
}

TEST_CASE("single-event solve matches the closed form at the default parameters") {
  const double q = 0.246341;
  const ExtinctionResult r = extinction_probability({q, 5, ChainKernel::SingleEvent});
  CHECK_THAT(r.extinction_probability, Catch::Matchers::WithinAbs(ruin_from_one(q, 5), 1e-12));
  CHECK_THAT(r.extinction_probability, Catch::Matchers::WithinAbs(0.32434, 1e-5));
  CHECK_THAT(r.zombie_win_probability, Catch::Matchers::WithinAbs(0.67566, 1e-5));
}

TEST_CASE("per-zombie-wave solve matches its Monte Carlo oracle") {
  const double q = 0.246341;
  const ExtinctionResult r = extinction_probability({q, 5, ChainKernel::PerZombieWave});
  constexpr std::uint64_t kTrials = 2000000;
  const double mc = chain_monte_carlo({q, 5, ChainKernel::PerZombieWave}, kTrials, 4242);
  const double se = std::sqrt(mc * (1.0 - mc) / static_cast<double>(kTrials));
  CHECK_THAT(r.extinction_probability, Catch::Matchers::WithinAbs(mc, 3.0 * se));
  // Both kernels land in the same ballpark as the published tree estimate.
  CHECK(r.zombie_win_probability > 0.63);
  CHECK(r.zombie_win_probability < 0.71);
}

TEST_CASE("solve agrees with simulation for random specs") {
  Rng rng(5150);
  for (int trial = 0; trial < 12; ++trial) {
    ChainSpec spec;
    spec.q = 0.05 + 0.9 * rng.uniform01();
    spec.cap = 2 + rng.uniform_below(7);  // cap in [2, 8]
    spec.kernel = rng.bernoulli(0.5) ? ChainKernel::SingleEvent : ChainKernel::PerZombieWave;
    CAPTURE(spec.q, spec.cap, static_cast<int>(spec.kernel));

    const double exact = extinction_probability(spec).extinction_probability;
    constexpr std::uint64_t kTrials = 200000;
    const double mc = chain_monte_carlo(spec, kTrials, rng.next_u64());
    const double se = std::sqrt(std::max(mc * (1.0 - mc), 1e-9) / static_cast<double>(kTrials));
    REQUIRE_THAT(exact, Catch::Matchers::WithinAbs(mc, 3.0 * se + 1e-9));
  }
}

TEST_CASE("extinction grows with q under both kernels") {
  for (const ChainKernel kernel : {ChainKernel::SingleEvent, ChainKernel::PerZombieWave}) {
    double prev = -1.0;
    for (double q = 0.0; q <= 1.0001; q += 0.05) {
      const double e =
          extinction_probability({std::min(q, 1.0), 5, kernel}).extinction_probability;
      REQUIRE(e >= prev - 1e-12);
      prev = e;
    }
  }
}

TEST_CASE("large cap converges to the supercritical branching limit") {
  const double q = 0.246341;
  const ExtinctionResult r = extinction_probability({q, 50, ChainKernel::SingleEvent});
  CHECK_THAT(r.extinction_probability, Catch::Matchers::WithinAbs(q / (1.0 - q), 1e-6));
}

TEST_CASE("absorption vector is monotone in the starting state") {
  for (const ChainKernel kernel : {ChainKernel::SingleEvent, ChainKernel::PerZombieWave}) {
    const ExtinctionResult r = extinction_probability({0.35, 8, kernel});
    REQUIRE(r.absorption_by_state.size() == 7);
    for (std::size_t i = 1; i < r.absorption_by_state.size(); ++i)
      REQUIRE(r.absorption_by_state[i] <= r.absorption_by_state[i - 1] + 1e-12);
    for (double v : r.absorption_by_state) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
  }
}

TEST_CASE("chain Monte Carlo basics") {
  CHECK(chain_monte_carlo({1.0, 5, ChainKernel::SingleEvent}, 100, 1) == 1.0);
  const double fair = chain_monte_carlo({0.5, 5, ChainKernel::SingleEvent}, 1000000, 2);
  CHECK_THAT(fair, Catch::Matchers::WithinAbs(0.8, 0.002));
  // Determinism.
  CHECK(chain_monte_carlo({0.3, 5, ChainKernel::PerZombieWave}, 1000, 77) ==
        chain_monte_carlo({0.3, 5, ChainKernel::PerZombieWave}, 1000, 77));
}

TEST_CASE("chain spec validation") {
  CHECK_THROWS_AS(extinction_probability({0.5, 1, ChainKernel::SingleEvent}),
                  std::invalid_argument);
  CHECK_THROWS_AS(extinction_probability({-0.1, 5, ChainKernel::SingleEvent}),
                  std::invalid_argument);
  CHECK_THROWS_AS(extinction_probability({1.1, 5, ChainKernel::SingleEvent}),
                  std::invalid_argument);
}
