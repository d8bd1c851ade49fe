#pragma once

#include <string>

#include "sponge/attack/outcome.hpp"
#include "sponge/text/homoglyph.hpp"

namespace sponge {

// First-order loss change of swapping one position's embedding:
// sum_j (e_new - e_old)_j * grad_j.
double replacement_increment(std::span<const double> grad, std::span<const double> e_old,
                             std::span<const double> e_new);

struct ScoredReplacement {
  std::size_t position = 0;
  char32_t replacement = 0;
  EditStrategy strategy = EditStrategy::none;
  // Predicted decrease of the attack loss, i.e. -replacement_increment.
  double score = 0.0;
};

// Scores every admissible single edit of `text` for one strategy. char: any
// base vocabulary character other than the current one. homo: table entries
// for the current character that the victim can embed. Positions listed in
// `frozen` (already edited) are skipped. Sorted by score descending, then
// position, then code point.
std::vector<ScoredReplacement> rank_replacements(const Victim& victim, const std::u32string& text,
                                                 const std::vector<std::vector<double>>& grads,
                                                 EditStrategy strategy,
                                                 const HomoglyphTable& homoglyphs,
                                                 const std::vector<bool>& frozen = {});

// Convenience overload that runs the forward/backward pass itself.
std::vector<ScoredReplacement> rank_replacements(const Victim& victim, const std::u32string& text,
                                                 std::span<const double> speaker,
                                                 EditStrategy strategy,
                                                 const HomoglyphTable& homoglyphs,
                                                 double target = 0.0);

// Gradient-guided beam search over single-character substitutions under the
// budget max(1, ceil(ratio * length)).
AttackOutcome attack_text(const Victim& victim, const std::u32string& text,
                          std::span<const double> speaker, const AttackConfig& config,
                          const HomoglyphTable& homoglyphs);

// Same search with an explicit replacement budget; a budget of 0 returns the
// original text.
AttackOutcome attack_text_with_budget(const Victim& victim, const std::u32string& text,
                                      std::span<const double> speaker,
                                      const AttackConfig& config,
                                      const HomoglyphTable& homoglyphs, std::size_t budget);

// One seeded random draw: `budget` distinct positions, each replaced by a
// random homoglyph or, by coin flip or when none is embeddable, a random base
// vocabulary character.
CandidateText random_text_candidate(const Victim& victim, const std::u32string& text,
                                    const AttackConfig& config,
                                    const HomoglyphTable& homoglyphs);

// random_text_candidate scored against the victim.
AttackOutcome baseline_text_random(const Victim& victim, const std::u32string& text,
                                   std::span<const double> speaker, const AttackConfig& config,
                                   const HomoglyphTable& homoglyphs);

}  // namespace sponge
