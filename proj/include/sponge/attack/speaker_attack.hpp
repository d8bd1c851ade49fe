#pragma once

#include "sponge/attack/outcome.hpp"

namespace sponge {

// PGD on the speaker embedding, minimizing the victim's attack loss under
// ||delta||_norm <= eps. Every iterate is scored by frames and the best one is
// returned; iterations == 0 returns the clean input.
AttackOutcome attack_speaker(const Victim& victim, std::span<const TokenId> text,
                             std::span<const double> speaker, const AttackConfig& config,
                             Norm norm);

// Random search: `config.iterations` seeded Gaussian draws projected onto the
// same ball, best by frames. No gradients.
AttackOutcome baseline_speaker_gaussian(const Victim& victim, std::span<const TokenId> text,
                                        std::span<const double> speaker,
                                        const AttackConfig& config, Norm norm);

}  // namespace sponge
