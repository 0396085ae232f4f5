#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "test_support.hpp"
#include "zsim/movement.hpp"

using namespace zsim;

namespace {

GridWorld open_world(std::uint32_t w, std::uint32_t h) {
  SyntheticSpec spec;
  spec.width = w;
  spec.height = h;
  spec.total_population = 0;
  spec.origin = Cell{0, 0};
  return synthetic_world(spec);
}

GridWorld open_world_with_holes(std::uint32_t w, std::uint32_t h, std::vector<RectSpec> holes) {
  SyntheticSpec spec;
  spec.width = w;
  spec.height = h;
  spec.total_population = 0;
  spec.impassable = std::move(holes);
  return synthetic_world(spec);  // origin defaults to the first passable cell
}

bool sector_contains(const HomeSector& s, Cell c) {
  for (int i = 0; i < s.sector_size; ++i)
    if (s.sector[i] == c) return true;
  return false;
}

bool available_contains(const HomeSector& s, Cell c) {
  for (int i = 0; i < s.available_size; ++i)
    if (s.available[i] == c) return true;
  return false;
}

}  // namespace

TEST_CASE("home sector geometry") {
  const GridWorld w = open_world(20, 20);

  SECTION("diagonal home: central NE with companions E and N") {
    const HomeSector s = home_sector(Cell{5, 5}, Cell{9, 9}, w);
    REQUIRE(s.sector_size == 3);
    CHECK(s.sector[0] == Cell{6, 6});  // central first
    CHECK(sector_contains(s, Cell{6, 5}));
    CHECK(sector_contains(s, Cell{5, 6}));
    CHECK(s.available_size == 3);
  }
  SECTION("straight-north home: central N with companions NW and NE") {
    const HomeSector s = home_sector(Cell{5, 5}, Cell{5, 9}, w);
    REQUIRE(s.sector_size == 3);
    CHECK(s.sector[0] == Cell{5, 6});
    CHECK(sector_contains(s, Cell{4, 6}));
    CHECK(sector_contains(s, Cell{6, 6}));
  }
  SECTION("impassable central cell drops out of the available sector") {
    const GridWorld holey = open_world_with_holes(20, 20, {RectSpec{6, 6, 6, 6}});
    const HomeSector s = home_sector(Cell{5, 5}, Cell{9, 9}, holey);
    CHECK(s.sector_size == 3);  // geometric sector ignores passability
    REQUIRE(s.available_size == 2);
    CHECK(available_contains(s, Cell{6, 5}));
    CHECK(available_contains(s, Cell{5, 6}));
    CHECK_FALSE(available_contains(s, Cell{6, 6}));
  }
  SECTION("central is a geometric neighbor and companions share an edge with it") {
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
      const Cell cur{static_cast<std::int32_t>(rng.uniform_below(20)),
                     static_cast<std::int32_t>(rng.uniform_below(20))};
      Cell home{static_cast<std::int32_t>(rng.uniform_below(20)),
                static_cast<std::int32_t>(rng.uniform_below(20))};
      if (home == cur) home.x = (home.x + 1) % 20;
      const HomeSector s = home_sector(cur, home, w);
      const Cell central = s.sector[0];
      CHECK(std::abs(central.x - cur.x) <= 1);
      CHECK(std::abs(central.y - cur.y) <= 1);
      CHECK_FALSE(central == cur);
      for (int i = 1; i < s.sector_size; ++i) {
        const int d = std::abs(s.sector[i].x - central.x) + std::abs(s.sector[i].y - central.y);
        CHECK(d == 1);  // edge-sharing
      }
    }
  }
}

TEST_CASE("substep distribution matches the movement formulas") {
  const MovementParams p{};
  const GridWorld w = open_world(40, 40);

  SECTION("x=4, h=3, a=5") {
    // Home straight east at distance 4.
    const Cell cur{10, 10}, home{14, 10};
    const SubstepDistribution d = human_substep_distribution(cur, home, w, p);
    REQUIRE(d.size == 8);
    double total = 0.0;
    int sector_cells = 0;
    for (int i = 0; i < d.size; ++i) total += d.entries[i].probability;
    for (const Cell c : {Cell{11, 10}, Cell{11, 11}, Cell{11, 9}}) {
      CHECK_THAT(d.probability_of(c), Catch::Matchers::WithinAbs(0.575 / 3.0, 1e-12));
      ++sector_cells;
    }
    for (const Cell c : {Cell{10, 11}, Cell{9, 11}, Cell{9, 10}, Cell{9, 9}, Cell{10, 9}})
      CHECK_THAT(d.probability_of(c), Catch::Matchers::WithinAbs(0.085, 1e-12));
    CHECK(sector_cells == 3);
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
  SECTION("x=12 boundary of the linear regime") {
    const Cell cur{10, 10}, home{22, 10};
    const SubstepDistribution d = human_substep_distribution(cur, home, w, p);
    CHECK_THAT(d.probability_of(Cell{11, 10}), Catch::Matchers::WithinAbs(0.325, 1e-12));
    CHECK_THAT(d.probability_of(Cell{9, 10}), Catch::Matchers::WithinAbs(0.005, 1e-12));
  }
  SECTION("x>=13 sends all mass to the sector") {
    // h = 2: edge cell so one sector candidate is out of bounds.
    const GridWorld small = open_world(40, 40);
    const Cell cur{10, 0}, home{24, 0};  // central E, companions NE/SE; SE out of bounds
    const SubstepDistribution d = human_substep_distribution(cur, home, small, p);
    REQUIRE(d.size == 2);
    CHECK_THAT(d.probability_of(Cell{11, 0}), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(d.probability_of(Cell{11, 1}), Catch::Matchers::WithinAbs(0.5, 1e-12));
  }
  SECTION("h=0 falls back to uniform over the available neighbors") {
    // Block the whole sector toward home (E, NE, SE), leaving 5 neighbors;
    // additionally block one of them to get 6 available total minus sector.
    const GridWorld holey = open_world_with_holes(
        40, 40, {RectSpec{11, 9, 11, 11}});  // E, NE, SE of (10,10) impassable
    const Cell cur{10, 10}, home{13, 10};
    const SubstepDistribution d = human_substep_distribution(cur, home, holey, p);
    REQUIRE(d.size == 5);
    for (int i = 0; i < d.size; ++i)
      CHECK_THAT(d.entries[i].probability, Catch::Matchers::WithinAbs(1.0 / 5.0, 1e-12));
  }
  SECTION("at home the distribution is uniform over available neighbors") {
    const Cell cur{10, 10};
    const SubstepDistribution d = human_substep_distribution(cur, cur, w, p);
    REQUIRE(d.size == 8);
    for (int i = 0; i < d.size; ++i)
      CHECK_THAT(d.entries[i].probability, Catch::Matchers::WithinAbs(0.125, 1e-12));
  }
  SECTION("boxed-in agent stays in place with probability one") {
    const GridWorld island = open_world_with_holes(
        5, 5, {RectSpec{0, 0, 4, 0}, RectSpec{0, 2, 4, 4}, RectSpec{0, 1, 1, 1},
               RectSpec{3, 1, 4, 1}});
    REQUIRE(island.neighbors(Cell{2, 1}).empty());
    const SubstepDistribution d = human_substep_distribution(Cell{2, 1}, Cell{2, 1}, island, p);
    REQUIRE(d.size == 1);
    CHECK(d.entries[0].cell == Cell{2, 1});
    CHECK(d.entries[0].probability == 1.0);
  }
}

TEST_CASE("distribution properties over random positions") {
  const MovementParams p{};
  const GridWorld w = open_world_with_holes(
      30, 30, {RectSpec{5, 5, 8, 7}, RectSpec{12, 0, 13, 4}, RectSpec{20, 18, 25, 22}});
  Rng rng(777);
  for (int trial = 0; trial < 2000; ++trial) {
    Cell cur{static_cast<std::int32_t>(rng.uniform_below(30)),
             static_cast<std::int32_t>(rng.uniform_below(30))};
    if (!w.passable(cur)) continue;
    const Cell home{static_cast<std::int32_t>(rng.uniform_below(30)),
                    static_cast<std::int32_t>(rng.uniform_below(30))};
    const SubstepDistribution d = human_substep_distribution(cur, home, w, p);
    double total = 0.0;
    for (int i = 0; i < d.size; ++i) {
      const auto& e = d.entries[i];
      total += e.probability;
      REQUIRE(e.probability >= 0.0);
      if (e.cell == cur) {
        REQUIRE(d.size == 1);  // stay-distribution only when boxed in
      } else {
        const auto nb = w.neighbors(cur);
        REQUIRE(std::find(nb.begin(), nb.end(), e.cell) != nb.end());
      }
    }
    REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("sector mass grows linearly in the distance") {
  const MovementParams p{};
  const GridWorld w = open_world(40, 40);
  double previous = 0.0;
  for (std::int32_t x = 1; x <= 12; ++x) {
    const Cell cur{15, 15};
    const Cell home{15 + x, 15};
    const SubstepDistribution d = human_substep_distribution(cur, home, w, p);
    double sector_mass = 0.0;
    for (const Cell c : {Cell{16, 15}, Cell{16, 16}, Cell{16, 14}})
      sector_mass += d.probability_of(c);
    CHECK_THAT(sector_mass, Catch::Matchers::WithinAbs(0.375 + 0.05 * x, 1e-12));
    CHECK(sector_mass >= previous);
    previous = sector_mass;
  }
}

TEST_CASE("sampling conforms to the distribution (chi-square)") {
  const MovementParams p{};
  const GridWorld w = open_world(40, 40);
  Rng rng(20240617);
  constexpr std::uint64_t kSamples = 1000000;

  auto conformance = [&](Cell cur, Cell home) {
    const SubstepDistribution d = human_substep_distribution(cur, home, w, p);
    std::map<std::pair<int, int>, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
      const Cell c = sample_human_substep(rng, cur, home, w, p);
      ++counts[{c.x, c.y}];
    }
    std::vector<std::uint64_t> observed;
    std::vector<double> expected;
    for (int i = 0; i < d.size; ++i) {
      observed.push_back(counts[{d.entries[i].cell.x, d.entries[i].cell.y}]);
      expected.push_back(d.entries[i].probability);
    }
    std::uint64_t covered = 0;
    for (auto v : observed) covered += v;
    REQUIRE(covered == kSamples);  // nothing sampled outside the support
    const double stat = test_support::chi2_statistic(observed, expected, kSamples);
    CHECK(stat < test_support::chi2_critical_001(d.size - 1));
  };

  conformance(Cell{10, 10}, Cell{14, 10});  // biased regime
  conformance(Cell{10, 10}, Cell{10, 10});  // at home
  conformance(Cell{10, 10}, Cell{30, 30});  // full bias
}

TEST_CASE("move_human takes two substeps") {
  const MovementParams p{};
  Rng rng(5);

  SECTION("single-cell island keeps the agent in place") {
    const GridWorld island = open_world_with_holes(
        3, 3, {RectSpec{0, 0, 2, 0}, RectSpec{0, 2, 2, 2}, RectSpec{0, 1, 0, 1},
               RectSpec{2, 1, 2, 1}});
    CHECK(move_human(rng, Cell{1, 1}, Cell{1, 1}, island, p) == Cell{1, 1});
  }
  SECTION("first substep from home is uniform over the 8 neighbors") {
    const GridWorld w = open_world(21, 21);
    const Cell home{10, 10};
    std::map<std::pair<int, int>, std::uint64_t> counts;
    constexpr std::uint64_t kSamples = 400000;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
      const Cell c = sample_human_substep(rng, home, home, w, p);
      ++counts[{c.x, c.y}];
    }
    REQUIRE(counts.size() == 8);
    for (const auto& [cell, n] : counts)
      CHECK_THAT(static_cast<double>(n) / kSamples, Catch::Matchers::WithinAbs(0.125, 0.002));
  }
  SECTION("net displacement never exceeds 2*sqrt(2) km") {
    const GridWorld w = open_world(25, 25);
    for (int i = 0; i < 20000; ++i) {
      const Cell start{12, 12};
      const Cell end = move_human(rng, start, Cell{20, 4}, w, p);
      const double dx = end.x - start.x;
      const double dy = end.y - start.y;
      REQUIRE(std::sqrt(dx * dx + dy * dy) <= 2.0 * std::sqrt(2.0) + 1e-9);
    }
  }
}

TEST_CASE("zombie movement is uniform over available neighbors") {
  Rng rng(11);

  SECTION("8 available") {
    const GridWorld w = open_world(5, 5);
    std::map<std::pair<int, int>, std::uint64_t> counts;
    constexpr std::uint64_t kSamples = 1000000;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
      const Cell c = move_zombie(rng, Cell{2, 2}, w);
      ++counts[{c.x, c.y}];
    }
    REQUIRE(counts.size() == 8);
    for (const auto& [cell, n] : counts)
      CHECK_THAT(static_cast<double>(n) / kSamples, Catch::Matchers::WithinAbs(0.125, 0.002));
  }
  SECTION("corner: 3 available") {
    const GridWorld w = open_world(5, 5);
    std::map<std::pair<int, int>, std::uint64_t> counts;
    constexpr std::uint64_t kSamples = 120000;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
      const Cell c = move_zombie(rng, Cell{0, 0}, w);
      ++counts[{c.x, c.y}];
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [cell, n] : counts)
      CHECK_THAT(static_cast<double>(n) / kSamples, Catch::Matchers::WithinAbs(1.0 / 3.0, 0.005));
  }
  SECTION("boxed in: stays") {
    const GridWorld island = open_world_with_holes(
        3, 3, {RectSpec{0, 0, 2, 0}, RectSpec{0, 2, 2, 2}, RectSpec{0, 1, 0, 1},
               RectSpec{2, 1, 2, 1}});
    CHECK(move_zombie(rng, Cell{1, 1}, island) == Cell{1, 1});
  }
}

TEST_CASE("movement params validation") {
  MovementParams p{};
  CHECK_NOTHROW(p.validate());
  p.bias_per_km = 0.2;  // 3*0.125 + 12*0.2 > 1
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MovementParams{};
  p.full_bias_distance = 20;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MovementParams{};
  p.base_weight = 0.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
