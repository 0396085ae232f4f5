#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "zsim/grid_world.hpp"
#include "zsim/rng.hpp"

namespace zsim {

// Parameters of the home-biased human walk. With the defaults, a human at
// integer distance x (1 <= x <= 12) from home puts mass 3*0.125 + 0.05*x on
// the three-cell sector towards home and the rest on the other neighbors;
// from x >= 13 all mass goes to the sector.
struct MovementParams {
  double base_weight = 0.125;
  double bias_per_km = 0.05;
  std::int32_t bias_cap_distance = 12;
  std::int32_t full_bias_distance = 13;

  void validate() const {
    if (base_weight < 0.0 || bias_per_km < 0.0)
      throw std::invalid_argument("movement: weights must be nonnegative");
    if (std::abs(8.0 * base_weight - 1.0) > 1e-12)
      throw std::invalid_argument("movement: 8 * base_weight must equal 1");
    if (bias_cap_distance < 1)
      throw std::invalid_argument("movement: bias_cap_distance must be >= 1");
    if (full_bias_distance != bias_cap_distance + 1)
      throw std::invalid_argument("movement: full_bias_distance must be bias_cap_distance + 1");
    if (3.0 * base_weight + bias_cap_distance * bias_per_km > 1.0 + 1e-12)
      throw std::invalid_argument("movement: sector mass exceeds 1 at the cap distance");
    if (5.0 * base_weight - bias_cap_distance * bias_per_km < -1e-12)
      throw std::invalid_argument("movement: away mass negative at the cap distance");
  }
};

namespace detail {

inline std::int32_t floor_distance(std::int64_t dx, std::int64_t dy) {
  const std::uint64_t r2 = static_cast<std::uint64_t>(dx * dx + dy * dy);
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(r2)));
  while (s > 0 && s * s > r2) --s;
  while ((s + 1) * (s + 1) <= r2) ++s;
  return static_cast<std::int32_t>(s);
}

// Direction of the geometric 8-neighbor closest to home (ties keep the first
// direction in the fixed order; with current != home no tie can actually
// occur).
inline int central_direction(Cell current, Cell home) {
  int best = 0;
  std::int64_t best_d2 = -1;
  for (int d = 0; d < 8; ++d) {
    const std::int64_t dx = static_cast<std::int64_t>(home.x) - (current.x + kDirDx[d]);
    const std::int64_t dy = static_cast<std::int64_t>(home.y) - (current.y + kDirDy[d]);
    const std::int64_t d2 = dx * dx + dy * dy;
    if (best_d2 < 0 || d2 < best_d2) {
      best_d2 = d2;
      best = d;
    }
  }
  return best;
}

inline std::uint8_t sector_bits(int central_dir) {
  return static_cast<std::uint8_t>((1u << central_dir) | (1u << ((central_dir + 1) & 7)) |
                                   (1u << ((central_dir + 7) & 7)));
}

inline int nth_set_dir(std::uint8_t mask, std::uint32_t n) {
  for (int d = 0; d < 8; ++d) {
    if (mask & (1u << d)) {
      if (n == 0) return d;
      --n;
    }
  }
  return -1;
}

}  // namespace detail

// The home sector of a human standing at `current`: the central geometric
// neighbor (closest to home) plus its two edge-sharing companions, clipped to
// the map; `available` additionally filters by passability. Requires
// current != home.
struct HomeSector {
  std::array<Cell, 3> sector{};
  int sector_size = 0;
  std::array<Cell, 3> available{};
  int available_size = 0;
  int central_dir = 0;
};

inline HomeSector home_sector(Cell current, Cell home, const GridWorld& world) {
  HomeSector out;
  out.central_dir = detail::central_direction(current, home);
  const std::uint8_t avail = world.neighbor_mask(world.index(current));
  const std::array<int, 3> dirs = {out.central_dir, (out.central_dir + 1) & 7,
                                   (out.central_dir + 7) & 7};
  for (int d : dirs) {
    const Cell c{current.x + kDirDx[d], current.y + kDirDy[d]};
    if (world.contains(c)) out.sector[out.sector_size++] = c;
    if (avail & (1u << d)) out.available[out.available_size++] = c;
  }
  return out;
}

// One movement decision, shared by the exact distribution and the sampler so
// the two cannot drift apart.
struct SubstepPlan {
  enum class Regime : std::uint8_t { Stay, UniformAvailable, Biased, SectorOnly };

  Cell current{};
  Regime regime = Regime::Stay;
  std::uint8_t avail_mask = 0;
  std::uint8_t sector_avail_mask = 0;  // Biased and SectorOnly
  double sector_total = 0.0;           // Biased only
};

inline SubstepPlan plan_human_substep(Cell current, Cell home, const GridWorld& world,
                                      const MovementParams& p) {
  SubstepPlan plan;
  plan.current = current;
  plan.avail_mask = world.neighbor_mask(world.index(current));
  if (plan.avail_mask == 0) {
    plan.regime = SubstepPlan::Regime::Stay;
    return plan;
  }
  if (current == home) {
    plan.regime = SubstepPlan::Regime::UniformAvailable;
    return plan;
  }
  const std::int32_t x = detail::floor_distance(home.x - current.x, home.y - current.y);
  const std::uint8_t sector = detail::sector_bits(detail::central_direction(current, home));
  plan.sector_avail_mask = plan.avail_mask & sector;
  const int h = std::popcount(plan.sector_avail_mask);
  const int a = std::popcount(static_cast<std::uint8_t>(plan.avail_mask & ~sector));
  if (x >= p.full_bias_distance) {
    plan.regime = h > 0 ? SubstepPlan::Regime::SectorOnly : SubstepPlan::Regime::UniformAvailable;
    return plan;
  }
  if (h == 0 || a == 0) {
    plan.regime = SubstepPlan::Regime::UniformAvailable;
    return plan;
  }
  plan.regime = SubstepPlan::Regime::Biased;
  plan.sector_total = 3.0 * p.base_weight + static_cast<double>(x) * p.bias_per_km;
  return plan;
}

// Probability distribution of one human substep: support is the available
// neighborhood (or the current cell when nothing is available).
struct SubstepDistribution {
  struct Entry {
    Cell cell;
    double probability;
  };
  std::array<Entry, 9> entries{};
  int size = 0;

  double probability_of(Cell c) const {
    for (int i = 0; i < size; ++i)
      if (entries[i].cell == c) return entries[i].probability;
    return 0.0;
  }
};

inline SubstepDistribution substep_distribution(const SubstepPlan& plan) {
  SubstepDistribution dist;
  const Cell c = plan.current;
  auto push = [&](int d, double prob) {
    dist.entries[dist.size++] = {Cell{c.x + kDirDx[d], c.y + kDirDy[d]}, prob};
  };
  switch (plan.regime) {
    case SubstepPlan::Regime::Stay:
      dist.entries[dist.size++] = {c, 1.0};
      break;
    case SubstepPlan::Regime::UniformAvailable: {
      const int k = std::popcount(plan.avail_mask);
      for (int d = 0; d < 8; ++d)
        if (plan.avail_mask & (1u << d)) push(d, 1.0 / k);
      break;
    }
    case SubstepPlan::Regime::SectorOnly: {
      const int h = std::popcount(plan.sector_avail_mask);
      for (int d = 0; d < 8; ++d)
        if (plan.sector_avail_mask & (1u << d)) push(d, 1.0 / h);
      break;
    }
    case SubstepPlan::Regime::Biased: {
      const int h = std::popcount(plan.sector_avail_mask);
      const std::uint8_t away = plan.avail_mask & ~plan.sector_avail_mask;
      const int a = std::popcount(away);
      for (int d = 0; d < 8; ++d) {
        if (plan.sector_avail_mask & (1u << d))
          push(d, plan.sector_total / h);
        else if (away & (1u << d))
          push(d, (1.0 - plan.sector_total) / a);
      }
      break;
    }
  }
  return dist;
}

inline Cell sample_substep(Rng& rng, const SubstepPlan& plan) {
  const Cell c = plan.current;
  auto pick = [&](std::uint8_t mask) {
    const int k = std::popcount(mask);
    const int d = detail::nth_set_dir(mask, rng.uniform_below(static_cast<std::uint32_t>(k)));
    return Cell{c.x + kDirDx[d], c.y + kDirDy[d]};
  };
  switch (plan.regime) {
    case SubstepPlan::Regime::Stay:
      return c;
    case SubstepPlan::Regime::UniformAvailable:
      return pick(plan.avail_mask);
    case SubstepPlan::Regime::SectorOnly:
      return pick(plan.sector_avail_mask);
    case SubstepPlan::Regime::Biased:
      if (rng.uniform01() < plan.sector_total) return pick(plan.sector_avail_mask);
      return pick(static_cast<std::uint8_t>(plan.avail_mask & ~plan.sector_avail_mask));
  }
  return c;
}

inline SubstepDistribution human_substep_distribution(Cell current, Cell home,
                                                      const GridWorld& world,
                                                      const MovementParams& p) {
  return substep_distribution(plan_human_substep(current, home, world, p));
}

inline Cell sample_human_substep(Rng& rng, Cell current, Cell home, const GridWorld& world,
                                 const MovementParams& p) {
  return sample_substep(rng, plan_human_substep(current, home, world, p));
}

// Two substeps, each re-planned from the cell reached by the previous one.
inline Cell move_human(Rng& rng, Cell position, Cell home, const GridWorld& world,
                       const MovementParams& p) {
  position = sample_human_substep(rng, position, home, world, p);
  return sample_human_substep(rng, position, home, world, p);
}

// Uniform step to any available neighbor; stays put when boxed in.
inline Cell move_zombie(Rng& rng, Cell position, const GridWorld& world) {
  const std::uint8_t mask = world.neighbor_mask(world.index(position));
  if (mask == 0) return position;
  const int k = std::popcount(mask);
  const int d = detail::nth_set_dir(mask, rng.uniform_below(static_cast<std::uint32_t>(k)));
  return Cell{position.x + kDirDx[d], position.y + kDirDy[d]};
}

}  // namespace zsim
