#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "zsim/rng.hpp"

namespace zsim {

// Fight/Flight/Freeze reaction model. The three reaction probabilities must
// sum to 1; the conditional win/escape probabilities belong to the stages of
// the interaction tree.
struct BehaviorTable {
  double p_fight = 0.25;
  double p_flight = 0.55;
  double p_freeze = 0.20;
  double p_win_fight = 0.5;    // human wins an outright fight
  double p_escape = 0.70;      // flight succeeds
  double p_win_caught = 0.10;  // human wins after being caught fleeing
  double p_win_freeze = 0.05;  // human wins while frozen

  void validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(p_fight) || !in01(p_flight) || !in01(p_freeze) || !in01(p_win_fight) ||
        !in01(p_escape) || !in01(p_win_caught) || !in01(p_win_freeze))
      throw std::invalid_argument("behavior: probabilities must lie in [0,1]");
    if (std::abs(p_fight + p_flight + p_freeze - 1.0) > 1e-12)
      throw std::invalid_argument("behavior: reaction probabilities must sum to 1");
  }
};

enum class Reaction : std::uint8_t { Fight, Flight, Freeze };

enum class InteractionOutcome : std::uint8_t { ZombieKilled, HumanInfected, HumanEscaped };

struct InteractionProbabilities {
  double zombie_dies;
  double human_infected;
  double human_escapes;
};

// Marginal outcome distribution of one zombie-human interaction.
inline InteractionProbabilities interaction_outcome_probabilities(const BehaviorTable& t) {
  InteractionProbabilities p{};
  p.zombie_dies = t.p_fight * t.p_win_fight + t.p_flight * (1.0 - t.p_escape) * t.p_win_caught +
                  t.p_freeze * t.p_win_freeze;
  p.human_infected = t.p_fight * (1.0 - t.p_win_fight) +
                     t.p_flight * (1.0 - t.p_escape) * (1.0 - t.p_win_caught) +
                     t.p_freeze * (1.0 - t.p_win_freeze);
  p.human_escapes = t.p_flight * t.p_escape;
  return p;
}

// Probability that the zombie loses, conditioned on the interaction being
// decisive (someone loses). Escapes carry no weight here.
inline double conditional_defeat_probability(const BehaviorTable& t) {
  const InteractionProbabilities p = interaction_outcome_probabilities(t);
  const double decisive = p.zombie_dies + p.human_infected;
  if (decisive <= 0.0)
    throw std::domain_error("behavior: all interactions are escapes, defeat probability undefined");
  return p.zombie_dies / decisive;
}

// Samples the two-stage tree: reaction first, then the outcome of that
// reaction. The marginal over outcomes equals
// interaction_outcome_probabilities(t).
inline InteractionOutcome resolve_interaction(Rng& rng, const BehaviorTable& t) {
  const double u = rng.uniform01();
  if (u < t.p_fight) {
    return rng.bernoulli(t.p_win_fight) ? InteractionOutcome::ZombieKilled
                                        : InteractionOutcome::HumanInfected;
  }
  if (u < t.p_fight + t.p_flight) {
    if (rng.bernoulli(t.p_escape)) return InteractionOutcome::HumanEscaped;
    return rng.bernoulli(t.p_win_caught) ? InteractionOutcome::ZombieKilled
                                         : InteractionOutcome::HumanInfected;
  }
  return rng.bernoulli(t.p_win_freeze) ? InteractionOutcome::ZombieKilled
                                       : InteractionOutcome::HumanInfected;
}

}  // namespace zsim
