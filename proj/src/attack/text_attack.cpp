#include "sponge/attack/text_attack.hpp"

#include <algorithm>
#include <unordered_set>

#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge {
namespace {

struct Scored {
  CandidateText text;
  std::int64_t frames = 0;
  double loss = 0.0;
};

// Longer output first, then lower loss, then text order.
bool fitter(const Scored& a, const Scored& b) {
  if (a.frames != b.frames) return a.frames > b.frames;
  if (a.loss != b.loss) return a.loss < b.loss;
  return a.text.chars < b.text.chars;
}

Scored score(const Victim& victim, CandidateText text, std::span<const double> speaker,
             double target) {
  const VictimOutput out = victim.evaluate(victim.embedding().encode(text.chars), speaker, target);
  return {std::move(text), out.frames, out.loss};
}

EditRules rules_for(const Victim& victim, const HomoglyphTable& homoglyphs) {
  const EmbeddingTable* table = &victim.embedding();
  return {[table](char32_t c) { return table->contains(c); }, &homoglyphs};
}

std::vector<bool> edited_mask(const CandidateText& text) {
  std::vector<bool> mask(text.chars.size(), false);
  for (const Edit& e : text.edits) mask[e.position] = true;
  return mask;
}

AttackOutcome finish(const Victim& victim, const std::u32string& original,
                     std::span<const double> speaker, const AttackConfig& config,
                     VictimOutput clean, CandidateText best, std::size_t budget) {
  AttackOutcome out;
  out.clean = std::move(clean);
  auto timed =
      timed_evaluate(victim, victim.embedding().encode(best.chars), speaker, config.target_y);
  out.adversarial = std::move(timed.output);
  out.adversarial_time_ms = timed.ms;
  out.text = TextPerturbation{original, std::move(best.chars), std::move(best.edits), budget};
  return out;
}

}  // namespace

double replacement_increment(std::span<const double> grad, std::span<const double> e_old,
                             std::span<const double> e_new) {
  if (grad.size() != e_old.size() || grad.size() != e_new.size()) {
    throw ShapeError("replacement increment needs equal-length vectors");
  }
  std::vector<double> diff(grad.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = e_new[j] - e_old[j];
  return simd::dot(diff, grad);
}

std::vector<ScoredReplacement> rank_replacements(const Victim& victim, const std::u32string& text,
                                                 const std::vector<std::vector<double>>& grads,
                                                 EditStrategy strategy,
                                                 const HomoglyphTable& homoglyphs,
                                                 const std::vector<bool>& frozen) {
  if (grads.size() != text.size()) {
    throw ShapeError("need one gradient per position: " + std::to_string(grads.size()) +
                     " for " + std::to_string(text.size()));
  }
  const EmbeddingTable& table = victim.embedding();
  std::vector<ScoredReplacement> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i < frozen.size() && frozen[i]) continue;
    const char32_t current = text[i];
    const auto old_row = table.row(table.id(current));
    auto add = [&](char32_t c) {
      const double inc = replacement_increment(grads[i], old_row, table.row(table.id(c)));
      out.push_back({i, c, strategy, -inc});
    };
    if (strategy == EditStrategy::char_swap) {
      for (TokenId id : table.base_ids()) {
        const char32_t c = table.character(id);
        if (c != current) add(c);
      }
    } else if (strategy == EditStrategy::homoglyph) {
      for (char32_t c : homoglyphs.lookup(current)) {
        if (table.contains(c)) add(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredReplacement& a, const ScoredReplacement& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.position != b.position) return a.position < b.position;
    return a.replacement < b.replacement;
  });
  return out;
}

std::vector<ScoredReplacement> rank_replacements(const Victim& victim, const std::u32string& text,
                                                 std::span<const double> speaker,
                                                 EditStrategy strategy,
                                                 const HomoglyphTable& homoglyphs,
                                                 double target) {
  ForwardPass pass = victim.forward(victim.embedding().encode(text), speaker, target);
  return rank_replacements(victim, text, pass.text_gradients(), strategy, homoglyphs);
}

AttackOutcome attack_text(const Victim& victim, const std::u32string& text,
                          std::span<const double> speaker, const AttackConfig& config,
                          const HomoglyphTable& homoglyphs) {
  return attack_text_with_budget(victim, text, speaker, config, homoglyphs,
                                 replacement_budget(text.size(), config.ratio));
}

AttackOutcome attack_text_with_budget(const Victim& victim, const std::u32string& text,
                                      std::span<const double> speaker,
                                      const AttackConfig& config,
                                      const HomoglyphTable& homoglyphs, std::size_t budget) {
  if (text.empty()) throw AttackError("cannot attack an empty text");
  const EditRules rules = rules_for(victim, homoglyphs);
  const auto candidate_cap = static_cast<std::size_t>(config.candidates_per_strategy);
  const auto beam_width = static_cast<std::size_t>(config.beam);

  const VictimOutput clean =
      victim.evaluate(victim.embedding().encode(text), speaker, config.target_y);
  Scored best{CandidateText::unedited(text), clean.frames, clean.loss};
  std::vector<Scored> beam{best};
  std::vector<std::int64_t> best_trace;
  int iterations_run = 0;

  for (int it = 0; it < config.iterations; ++it) {
    std::vector<Scored> pool;
    std::unordered_set<std::u32string> seen;
    bool open_member = false;
    for (const Scored& member : beam) {
      if (member.text.edits.size() >= budget) continue;
      open_member = true;
      const auto ids = victim.embedding().encode(member.text.chars);
      ForwardPass pass = victim.forward(ids, speaker, config.target_y);
      const auto grads = pass.text_gradients();
      const auto frozen = edited_mask(member.text);
      for (EditStrategy strategy : {EditStrategy::char_swap, EditStrategy::homoglyph}) {
        const auto ranked =
            rank_replacements(victim, member.text.chars, grads, strategy, homoglyphs, frozen);
        const std::size_t take = std::min(candidate_cap, ranked.size());
        for (std::size_t k = 0; k < take; ++k) {
          CandidateText cand = apply_edit(member.text, ranked[k].position, ranked[k].replacement,
                                          strategy, rules);
          if (!seen.insert(cand.chars).second) continue;
          pool.push_back(score(victim, std::move(cand), speaker, config.target_y));
        }
      }
    }
    if (!open_member) break;  // every member has spent the budget
    ++iterations_run;
    if (!pool.empty()) {
      std::sort(pool.begin(), pool.end(), fitter);
      if (fitter(pool.front(), best)) best = pool.front();
      pool.resize(std::min(beam_width, pool.size()));
      beam = std::move(pool);
    }
    best_trace.push_back(best.frames);
  }

  AttackOutcome out =
      finish(victim, text, speaker, config, clean, std::move(best.text), budget);
  out.best_frames = std::move(best_trace);
  out.iterations_run = iterations_run;
  return out;
}

CandidateText random_text_candidate(const Victim& victim, const std::u32string& text,
                                    const AttackConfig& config,
                                    const HomoglyphTable& homoglyphs) {
  if (text.empty()) throw AttackError("cannot perturb an empty text");
  const EmbeddingTable& table = victim.embedding();
  const EditRules rules = rules_for(victim, homoglyphs);
  const std::size_t budget = replacement_budget(text.size(), config.ratio);
  Rng rng(config.seed);

  std::vector<std::size_t> positions(text.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  for (std::size_t i = 0; i < budget; ++i) {
    std::swap(positions[i], positions[i + rng.index(positions.size() - i)]);
  }
  positions.resize(budget);
  std::sort(positions.begin(), positions.end());

  CandidateText cand = CandidateText::unedited(text);
  for (std::size_t pos : positions) {
    const char32_t current = text[pos];
    std::vector<char32_t> glyphs;
    for (char32_t c : homoglyphs.lookup(current)) {
      if (table.contains(c)) glyphs.push_back(c);
    }
    const bool homo = rng.uniform() < 0.5;
    if (homo && !glyphs.empty()) {
      cand = apply_edit(cand, pos, glyphs[rng.index(glyphs.size())], EditStrategy::homoglyph,
                        rules);
      continue;
    }
    std::vector<char32_t> pool;
    for (TokenId id : table.base_ids()) {
      if (table.character(id) != current) pool.push_back(table.character(id));
    }
    cand = apply_edit(cand, pos, pool[rng.index(pool.size())], EditStrategy::char_swap, rules);
  }
  return cand;
}

AttackOutcome baseline_text_random(const Victim& victim, const std::u32string& text,
                                   std::span<const double> speaker, const AttackConfig& config,
                                   const HomoglyphTable& homoglyphs) {
  CandidateText cand = random_text_candidate(victim, text, config, homoglyphs);
  const VictimOutput clean =
      victim.evaluate(victim.embedding().encode(text), speaker, config.target_y);
  const std::size_t budget = replacement_budget(text.size(), config.ratio);
  AttackOutcome out = finish(victim, text, speaker, config, clean, std::move(cand), budget);
  out.best_frames = {out.adversarial.frames};
  out.iterations_run = 1;
  return out;
}

}  // namespace sponge
