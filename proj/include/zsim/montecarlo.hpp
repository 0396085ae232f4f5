#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

#include "zsim/behavior.hpp"
#include "zsim/engine.hpp"
#include "zsim/grid_world.hpp"
#include "zsim/intervention.hpp"
#include "zsim/movement.hpp"
#include "zsim/rng.hpp"

namespace zsim {

struct BatchConfig {
  std::uint32_t n_runs = 1000;
  std::uint64_t base_seed = 1;
  std::uint32_t max_parallel_runs = 1;
  ScenarioPolicy policy;
  BehaviorTable behavior;
  MovementParams movement;
  std::uint32_t incubation_steps = 1;
  std::uint32_t max_steps = 2000;
  std::uint32_t trajectory_stride = 1;

  void validate() const {
    if (max_parallel_runs < 1)
      throw std::invalid_argument("batch: max_parallel_runs must be >= 1");
    policy.validate();
    behavior.validate();
    movement.validate();
  }
};

// Aggregated results of a batch. Outcomes are indexed by run id, so every
// sample in the histograms traces back to a run.
struct BatchSummary {
  std::uint32_t n_runs = 0;
  std::uint64_t human_wins = 0;
  std::uint64_t zombie_wins = 0;
  std::uint64_t unresolved = 0;
  std::vector<RunOutcome> outcomes;
  std::map<std::uint32_t, std::uint64_t> human_win_steps;   // end_step -> count
  std::map<std::uint32_t, std::uint64_t> zombie_win_steps;  // end_step -> count
  std::map<std::uint32_t, std::uint64_t> first_border_steps;
  std::map<std::uint64_t, std::uint64_t> peak_zombie_counts;
  // Per step index: (min, max) live zombie count over the runs that recorded
  // that step.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> zombie_envelope;
};

inline BatchSummary aggregate(std::vector<RunOutcome> outcomes) {
  BatchSummary s;
  s.n_runs = static_cast<std::uint32_t>(outcomes.size());
  for (const RunOutcome& o : outcomes) {
    switch (o.winner) {
      case Winner::Humans:
        ++s.human_wins;
        ++s.human_win_steps[o.end_step];
        break;
      case Winner::Zombies:
        ++s.zombie_wins;
        ++s.zombie_win_steps[o.end_step];
        break;
      case Winner::Unresolved:
        ++s.unresolved;
        break;
    }
    if (o.first_border_step) ++s.first_border_steps[*o.first_border_step];
    ++s.peak_zombie_counts[o.peak_zombies];
    for (const TrajectoryRow& row : o.trajectory) {
      if (s.zombie_envelope.size() <= row.step)
        s.zombie_envelope.resize(row.step + 1, {UINT64_MAX, 0});
      auto& [lo, hi] = s.zombie_envelope[row.step];
      lo = std::min(lo, row.zombies);
      hi = std::max(hi, row.zombies);
    }
  }
  s.outcomes = std::move(outcomes);
  return s;
}

// Runs cfg.n_runs independent runs. Run i draws its stream from
// mix_seed(base_seed, i), so the result is a pure function of the
// configuration: thread count and scheduling cannot change any output.
inline BatchSummary run_batch(const GridWorld& world, const BatchConfig& cfg) {
  cfg.validate();
  std::vector<RunOutcome> outcomes(cfg.n_runs);
  if (cfg.n_runs > 0) {
    const std::uint32_t n_workers = std::min(cfg.max_parallel_runs, cfg.n_runs);
    std::atomic<std::uint32_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::uint32_t i = next.fetch_add(1);
        if (i >= cfg.n_runs) return;
        outcomes[i] = run(world, cfg.policy, cfg.behavior, cfg.movement,
                          mix_seed(cfg.base_seed, i), cfg.max_steps, cfg.incubation_steps,
                          cfg.trajectory_stride);
      }
    };
    if (n_workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      threads.reserve(n_workers);
      for (std::uint32_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
    }
  }
  return aggregate(std::move(outcomes));
}

}  // namespace zsim
