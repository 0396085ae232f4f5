#pragma once

#include <cstdint>
#include <stdexcept>

#include "zsim/grid_world.hpp"
#include "zsim/rng.hpp"

namespace zsim {

enum class ScenarioKind : std::uint8_t { NoIntervention, Strict, Leaky };

// Quarantine policy for one run. The border is policed from activation_step
// onward; under Leaky an outbound crossing slips through with
// leak_probability, sampled independently per attempt.
struct ScenarioPolicy {
  ScenarioKind kind = ScenarioKind::NoIntervention;
  std::uint32_t activation_step = 14;
  double leak_probability = 0.001;

  void validate() const {
    if (leak_probability < 0.0 || leak_probability > 1.0)
      throw std::invalid_argument("scenario: leak probability must lie in [0,1]");
  }
};

enum class AgentKind : std::uint8_t { Human, IncubatingHuman, Zombie };

enum class CrossingVerdict : std::uint8_t { Allow, Stop, Kill };

// Adjudicates one movement attempt from `from` to `to` at the given step.
// Crossings within one side of the border are always allowed; humans and
// incubating humans are stopped, never killed (guards cannot tell them
// apart); zombies caught heading out are killed. Nobody enters from outside
// while the border is active.
inline CrossingVerdict adjudicate_crossing(const ScenarioPolicy& policy, std::uint32_t step,
                                           AgentKind kind, Cell from, Cell to,
                                           const GridWorld& world, Rng& rng) {
  if (policy.kind == ScenarioKind::NoIntervention || step < policy.activation_step)
    return CrossingVerdict::Allow;
  const bool from_inside = world.in_quarantine(from);
  const bool to_inside = world.in_quarantine(to);
  if (from_inside == to_inside) return CrossingVerdict::Allow;
  if (!from_inside) return CrossingVerdict::Stop;  // inbound: stopped, not killed
  // Outbound.
  if (policy.kind == ScenarioKind::Leaky && rng.bernoulli(policy.leak_probability))
    return CrossingVerdict::Allow;
  return kind == AgentKind::Zombie ? CrossingVerdict::Kill : CrossingVerdict::Stop;
}

}  // namespace zsim
