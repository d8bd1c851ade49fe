#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sponge/text/homoglyph.hpp"

namespace sponge {

struct Utterance {
  std::string id;
  std::u32string chars;
  std::optional<std::string> speaker_ref;
};

enum class EditStrategy { none, char_swap, homoglyph };

const char* strategy_name(EditStrategy strategy);

struct Edit {
  std::size_t position = 0;
  char32_t old_char = 0;
  char32_t new_char = 0;
  EditStrategy strategy = EditStrategy::none;

  friend bool operator==(const Edit&, const Edit&) = default;
};

// A perturbed copy of an utterance. Length always equals the original's;
// edits are kept sorted by position and never touch a position twice.
struct CandidateText {
  std::u32string chars;
  std::vector<Edit> edits;

  static CandidateText unedited(std::u32string original);
  bool edited_at(std::size_t position) const;
  // Strategy label for the candidate as a whole: none, the single strategy
  // used by all edits, or "mixed".
  std::string strategy_label() const;
};

// Decides whether a replacement may be applied at a position.
struct EditRules {
  std::function<bool(char32_t)> in_vocabulary;
  const HomoglyphTable* homoglyphs = nullptr;
};

// Single-position substitution. Throws std::out_of_range for a bad position
// and AttackError for an inadmissible or no-op replacement, or for a position
// that was already edited.
CandidateText apply_edit(const CandidateText& text, std::size_t position, char32_t replacement,
                         EditStrategy strategy, const EditRules& rules);

// Maximum number of replaced characters: max(1, ceil(ratio * length)).
std::size_t replacement_budget(std::size_t length, double ratio);

std::u32string apply_edits(const std::u32string& original, const std::vector<Edit>& edits);
std::u32string revert_edits(const std::u32string& candidate, const std::vector<Edit>& edits);

// Number of positions where the two equal-length strings differ.
std::size_t hamming_distance(const std::u32string& a, const std::u32string& b);

}  // namespace sponge
