#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zsim/behavior.hpp"
#include "zsim/grid_world.hpp"
#include "zsim/intervention.hpp"
#include "zsim/movement.hpp"
#include "zsim/rng.hpp"

namespace zsim {

enum class AgentStatus : std::uint8_t { Healthy, Incubating, Zombie, DeadZombie };

enum class Winner : std::uint8_t { Humans, Zombies, Unresolved };

enum class Termination : std::uint8_t { Ongoing, HumansWin, ZombiesWin };

struct TrajectoryRow {
  std::uint32_t step;
  std::uint64_t healthy;
  std::uint64_t incubating;
  std::uint64_t zombies;
  std::uint64_t dead_zombies;
};

struct RunOutcome {
  Winner winner = Winner::Unresolved;
  std::uint32_t end_step = 0;
  std::uint64_t peak_zombies = 0;
  std::optional<std::uint32_t> first_border_step;
  std::vector<TrajectoryRow> trajectory;
};

// Mutable state of one simulation run. One run is strictly single-threaded:
// it owns its agents, cell index and random stream. Agent ids are stable;
// humans are numbered per cell in cell-index order, the initial zombie gets
// the last id.
class SimState {
 public:
  std::uint32_t step = 0;
  Rng rng;
  ScenarioPolicy policy;
  std::uint32_t incubation_steps = 1;

  // Agents (structure of arrays, indexed by id).
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> home;
  std::vector<AgentStatus> status;
  std::vector<std::uint8_t> incubation_left;

  // Live zombie ids, ascending.
  std::vector<std::uint32_t> live_zombies;
  // Ids currently incubating (appended in infection order, sorted at use).
  std::vector<std::uint32_t> incubating_ids;

  // Civilians (Healthy or Incubating) bucketed by cell, with each agent's
  // slot in its bucket for O(1) removal.
  std::vector<std::vector<std::uint32_t>> cell_civilians;
  std::vector<std::uint32_t> bucket_slot;

  // Running counters.
  std::uint64_t n_healthy = 0;
  std::uint64_t n_incubating = 0;
  std::uint64_t n_zombies = 0;
  std::uint64_t n_dead = 0;
  std::uint64_t zombies_outside = 0;     // live zombies on non-quarantine cells
  std::uint64_t incubating_outside = 0;  // incubating agents on non-quarantine cells
  std::uint64_t peak_zombies = 0;
  std::int64_t first_border_step = -1;   // -1 = not yet observed
  std::uint32_t trajectory_stride = 1;
  std::vector<TrajectoryRow> trajectory;

  explicit SimState(std::uint64_t seed) : rng(seed) {}

  std::uint64_t agent_count() const { return pos.size(); }

  void record_row(std::uint32_t at_step) {
    peak_zombies = std::max(peak_zombies, n_zombies);
    if (trajectory_stride <= 1 || at_step % trajectory_stride == 0) {
      trajectory.push_back(TrajectoryRow{at_step, n_healthy, n_incubating, n_zombies, n_dead});
      last_recorded_ = at_step;
    }
  }

  void force_record_final() {
    if (last_recorded_ != step)
      trajectory.push_back(TrajectoryRow{step, n_healthy, n_incubating, n_zombies, n_dead});
    last_recorded_ = step;
  }

  void check_conservation(std::uint64_t expected) const {
    if (n_healthy + n_incubating + n_zombies + n_dead != expected)
      throw std::logic_error("engine: agent conservation violated");
  }

  // Scratch buffers reused across steps.
  std::vector<std::uint32_t> zcell_count;
  std::vector<std::uint32_t> zcell_offset;
  std::vector<std::uint32_t> zsorted;
  std::vector<std::uint32_t> snapshot_ids;
  std::vector<std::int32_t> snapshot_next;

 private:
  std::uint32_t last_recorded_ = 0xFFFFFFFFu;
};

// Fresh state: one human per unit of initial population (home = birth cell)
// plus a single zombie at the origin, additional to the population.
inline SimState init_run(const GridWorld& world, const ScenarioPolicy& policy,
                         std::uint64_t seed, std::uint32_t incubation_steps = 1,
                         std::uint32_t trajectory_stride = 1) {
  policy.validate();
  if (incubation_steps == 0 || incubation_steps > 255)
    throw std::invalid_argument("engine: incubation_steps must lie in [1, 255]");
  SimState st(seed);
  st.policy = policy;
  st.incubation_steps = incubation_steps;
  st.trajectory_stride = trajectory_stride == 0 ? 1 : trajectory_stride;

  const std::uint64_t n_humans = world.total_population();
  st.pos.reserve(n_humans + 1);
  st.home.reserve(n_humans + 1);
  st.status.reserve(n_humans + 1);
  st.cell_civilians.assign(world.cell_count(), {});
  st.bucket_slot.assign(n_humans + 1, 0);

  for (std::uint32_t idx = 0; idx < world.cell_count(); ++idx) {
    const std::uint32_t pop = world.population_index(idx);
    if (pop == 0) continue;
    auto& bucket = st.cell_civilians[idx];
    bucket.reserve(pop);
    for (std::uint32_t k = 0; k < pop; ++k) {
      const auto id = static_cast<std::uint32_t>(st.pos.size());
      st.pos.push_back(idx);
      st.home.push_back(idx);
      st.status.push_back(AgentStatus::Healthy);
      st.bucket_slot[id] = static_cast<std::uint32_t>(bucket.size());
      bucket.push_back(id);
    }
  }
  st.n_healthy = n_humans;

  const std::uint32_t origin_idx = world.index(world.origin());
  st.pos.push_back(origin_idx);
  st.home.push_back(origin_idx);
  st.status.push_back(AgentStatus::Zombie);
  st.live_zombies.push_back(static_cast<std::uint32_t>(n_humans));
  st.n_zombies = 1;
  if (!world.in_quarantine_index(origin_idx)) {
    st.zombies_outside = 1;
    st.first_border_step = 0;
  }
  st.incubation_left.assign(st.pos.size(), 0);

  st.record_row(0);
  return st;
}

namespace detail {

inline void remove_from_bucket(SimState& st, std::uint32_t id) {
  auto& bucket = st.cell_civilians[st.pos[id]];
  const std::uint32_t slot = st.bucket_slot[id];
  const std::uint32_t last = bucket.back();
  bucket[slot] = last;
  st.bucket_slot[last] = slot;
  bucket.pop_back();
}

inline void move_in_bucket(SimState& st, std::uint32_t id, std::uint32_t to) {
  remove_from_bucket(st, id);
  auto& bucket = st.cell_civilians[to];
  st.bucket_slot[id] = static_cast<std::uint32_t>(bucket.size());
  bucket.push_back(id);
  st.pos[id] = to;
}

inline void infect(SimState& st, const GridWorld& world, std::uint32_t id) {
  st.status[id] = AgentStatus::Incubating;
  st.incubation_left[id] = static_cast<std::uint8_t>(st.incubation_steps);
  st.incubating_ids.push_back(id);
  --st.n_healthy;
  ++st.n_incubating;
  if (!world.in_quarantine_index(st.pos[id])) ++st.incubating_outside;
}

inline void kill_zombie(SimState& st, const GridWorld& world, std::uint32_t id) {
  st.status[id] = AgentStatus::DeadZombie;
  --st.n_zombies;
  ++st.n_dead;
  if (!world.in_quarantine_index(st.pos[id])) --st.zombies_outside;
}

}  // namespace detail

// Resolves every zombie-human pair in one cell, zombies in ascending id
// order, each walking the cell's healthy humans in ascending id order
// (snapshot from the start of the cell's resolution). A zombie stops
// interacting the moment it dies; an infected human is skipped by all later
// zombies in the cell and interacts no further this step.
inline void resolve_cell_interactions(SimState& st, const GridWorld& world, std::uint32_t cell,
                                      const std::uint32_t* zombie_ids, std::size_t n_cell_zombies,
                                      const BehaviorTable& table) {
  auto& ids = st.snapshot_ids;
  auto& next = st.snapshot_next;
  ids.clear();
  for (std::uint32_t id : st.cell_civilians[cell])
    if (st.status[id] == AgentStatus::Healthy) ids.push_back(id);
  if (ids.empty()) return;
  std::sort(ids.begin(), ids.end());

  // Singly linked worklist over the snapshot; infected entries are spliced
  // out so later zombies never rescan them.
  next.assign(ids.size(), 0);
  for (std::size_t i = 0; i < ids.size(); ++i)
    next[i] = (i + 1 < ids.size()) ? static_cast<std::int32_t>(i) + 1 : -1;
  std::int32_t head = 0;

  for (std::size_t zi = 0; zi < n_cell_zombies && head >= 0; ++zi) {
    const std::uint32_t zid = zombie_ids[zi];
    if (st.status[zid] != AgentStatus::Zombie) continue;
    std::int32_t* link = &head;
    std::int32_t cur = head;
    while (cur >= 0) {
      const std::uint32_t hid = ids[static_cast<std::size_t>(cur)];
      const InteractionOutcome outcome = resolve_interaction(st.rng, table);
      if (outcome == InteractionOutcome::ZombieKilled) {
        detail::kill_zombie(st, world, zid);
        break;
      }
      if (outcome == InteractionOutcome::HumanInfected) {
        detail::infect(st, world, hid);
        *link = next[static_cast<std::size_t>(cur)];
        cur = *link;
      } else {  // HumanEscaped: stays healthy, stays in the cell
        link = &next[static_cast<std::size_t>(cur)];
        cur = *link;
      }
    }
  }
}

// Convenience overload for tests: resolves one cell using the cell's own
// zombie roster.
inline void resolve_cell_interactions(SimState& st, const GridWorld& world, std::uint32_t cell,
                                      const BehaviorTable& table) {
  std::vector<std::uint32_t> zs;
  for (std::uint32_t id : st.live_zombies)
    if (st.pos[id] == cell && st.status[id] == AgentStatus::Zombie) zs.push_back(id);
  resolve_cell_interactions(st, world, cell, zs.data(), zs.size(), table);
}

// One hourly step: (1) promote incubating agents whose delay has elapsed,
// (2) resolve interactions in every cell holding a live zombie, (3) move all
// agents with border adjudication per substep, (4) record counts and the
// first border crossing, (5) advance the clock.
inline void step(SimState& st, const GridWorld& world, const BehaviorTable& table,
                 const MovementParams& params) {
  const std::uint32_t exec_step = st.step + 1;
  const std::uint64_t total_agents = st.agent_count();

  // Phase 1: promotion.
  if (!st.incubating_ids.empty()) {
    std::sort(st.incubating_ids.begin(), st.incubating_ids.end());
    std::vector<std::uint32_t> promoted;
    promoted.reserve(st.incubating_ids.size());
    std::size_t keep = 0;
    for (std::uint32_t id : st.incubating_ids) {
      if (--st.incubation_left[id] == 0) {
        st.status[id] = AgentStatus::Zombie;
        detail::remove_from_bucket(st, id);
        --st.n_incubating;
        ++st.n_zombies;
        if (!world.in_quarantine_index(st.pos[id])) {
          --st.incubating_outside;
          ++st.zombies_outside;
        }
        promoted.push_back(id);
      } else {
        st.incubating_ids[keep++] = id;
      }
    }
    st.incubating_ids.resize(keep);
    if (!promoted.empty()) {
      const std::size_t mid = st.live_zombies.size();
      st.live_zombies.insert(st.live_zombies.end(), promoted.begin(), promoted.end());
      std::inplace_merge(st.live_zombies.begin(),
                         st.live_zombies.begin() + static_cast<std::ptrdiff_t>(mid),
                         st.live_zombies.end());
    }
  }

  // Phase 2: interactions, cells in ascending index order. Zombies are
  // grouped by cell with a counting sort (stable over the ascending id
  // list), so per-cell order is ascending id.
  if (!st.live_zombies.empty()) {
    const std::size_t n_cells = world.cell_count();
    st.zcell_count.assign(n_cells + 1, 0);
    for (std::uint32_t id : st.live_zombies) ++st.zcell_count[st.pos[id]];
    st.zcell_offset.assign(n_cells + 1, 0);
    std::uint32_t acc = 0;
    std::vector<std::uint32_t> occupied;
    occupied.reserve(256);
    for (std::size_t c = 0; c < n_cells; ++c) {
      st.zcell_offset[c] = acc;
      if (st.zcell_count[c] > 0) occupied.push_back(static_cast<std::uint32_t>(c));
      acc += st.zcell_count[c];
    }
    st.zcell_offset[n_cells] = acc;
    st.zsorted.resize(st.live_zombies.size());
    {
      std::vector<std::uint32_t>& cursor = st.zcell_count;  // reuse as write cursor
      for (std::size_t c = 0; c < n_cells; ++c) cursor[c] = st.zcell_offset[c];
      for (std::uint32_t id : st.live_zombies) st.zsorted[cursor[st.pos[id]]++] = id;
    }
    for (std::uint32_t cell : occupied) {
      const std::uint32_t begin = st.zcell_offset[cell];
      const std::uint32_t end = st.zcell_offset[cell + 1];
      resolve_cell_interactions(st, world, cell, st.zsorted.data() + begin, end - begin, table);
    }
  }

  // Phase 3: movement, agents in ascending id order.
  for (std::uint32_t id = 0; id < total_agents; ++id) {
    switch (st.status[id]) {
      case AgentStatus::Healthy: {
        const Cell home_cell = world.cell_at(st.home[id]);
        for (int substep = 0; substep < 2; ++substep) {
          const Cell from = world.cell_at(st.pos[id]);
          const SubstepPlan plan = plan_human_substep(from, home_cell, world, params);
          const Cell to = sample_substep(st.rng, plan);
          if (to == from) break;  // boxed in; the second substep cannot differ
          const CrossingVerdict verdict = adjudicate_crossing(
              st.policy, exec_step, AgentKind::Human, from, to, world, st.rng);
          if (verdict == CrossingVerdict::Allow) detail::move_in_bucket(st, id, world.index(to));
        }
        break;
      }
      case AgentStatus::Incubating: {
        const Cell from = world.cell_at(st.pos[id]);
        const Cell to = move_zombie(st.rng, from, world);
        if (to == from) break;
        const CrossingVerdict verdict = adjudicate_crossing(
            st.policy, exec_step, AgentKind::IncubatingHuman, from, to, world, st.rng);
        if (verdict == CrossingVerdict::Allow) {
          const bool was_outside = !world.in_quarantine(from);
          const bool now_outside = !world.in_quarantine(to);
          detail::move_in_bucket(st, id, world.index(to));
          if (was_outside != now_outside) {
            if (now_outside)
              ++st.incubating_outside;
            else
              --st.incubating_outside;
          }
        }
        break;
      }
      case AgentStatus::Zombie: {
        const Cell from = world.cell_at(st.pos[id]);
        const Cell to = move_zombie(st.rng, from, world);
        if (to == from) break;
        const CrossingVerdict verdict = adjudicate_crossing(
            st.policy, exec_step, AgentKind::Zombie, from, to, world, st.rng);
        if (verdict == CrossingVerdict::Allow) {
          const bool was_outside = !world.in_quarantine(from);
          const bool now_outside = !world.in_quarantine(to);
          st.pos[id] = world.index(to);
          if (was_outside != now_outside) {
            if (now_outside)
              ++st.zombies_outside;
            else
              --st.zombies_outside;
          }
        } else if (verdict == CrossingVerdict::Kill) {
          detail::kill_zombie(st, world, id);
        }
        break;
      }
      case AgentStatus::DeadZombie:
        break;
    }
  }
  std::erase_if(st.live_zombies, [&](std::uint32_t id) { return st.status[id] != AgentStatus::Zombie; });

  // Phase 4: recording.
  st.record_row(exec_step);
  if (st.first_border_step < 0 && st.zombies_outside > 0) st.first_border_step = exec_step;
  st.check_conservation(total_agents);

  // Phase 5.
  st.step = exec_step;
}

// Win check. Zombie victory (no healthy humans anywhere) dominates; under a
// strict quarantine humans additionally win once the border is active and no
// zombie or incubating agent remains outside it.
inline Termination check_termination(const SimState& st) {
  if (st.n_healthy == 0) return Termination::ZombiesWin;
  if (st.n_zombies == 0 && st.n_incubating == 0) return Termination::HumansWin;
  if (st.policy.kind == ScenarioKind::Strict && st.step >= st.policy.activation_step &&
      st.zombies_outside == 0 && st.incubating_outside == 0)
    return Termination::HumansWin;
  return Termination::Ongoing;
}

// Full run loop. Never throws on ordinary outcomes; hitting max_steps yields
// Winner::Unresolved.
inline RunOutcome run(const GridWorld& world, const ScenarioPolicy& policy,
                      const BehaviorTable& table, const MovementParams& params,
                      std::uint64_t seed, std::uint32_t max_steps = 2000,
                      std::uint32_t incubation_steps = 1, std::uint32_t trajectory_stride = 1) {
  if (max_steps < 1) throw std::invalid_argument("engine: max_steps must be >= 1");
  table.validate();
  params.validate();
  SimState st = init_run(world, policy, seed, incubation_steps, trajectory_stride);

  RunOutcome out;
  for (;;) {
    const Termination t = check_termination(st);
    if (t == Termination::HumansWin) {
      out.winner = Winner::Humans;
      break;
    }
    if (t == Termination::ZombiesWin) {
      out.winner = Winner::Zombies;
      break;
    }
    if (st.step >= max_steps) {
      out.winner = Winner::Unresolved;
      break;
    }
    step(st, world, table, params);
  }
  st.force_record_final();
  out.end_step = st.step;
  out.peak_zombies = st.peak_zombies;
  if (st.first_border_step >= 0)
    out.first_border_step = static_cast<std::uint32_t>(st.first_border_step);
  out.trajectory = std::move(st.trajectory);
  return out;
}

}  // namespace zsim
