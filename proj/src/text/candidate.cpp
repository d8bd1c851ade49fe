#include "sponge/text/candidate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sponge/error.hpp"
#include "sponge/text/utf8.hpp"

namespace sponge {

const char* strategy_name(EditStrategy strategy) {
  switch (strategy) {
    case EditStrategy::none: return "none";
    case EditStrategy::char_swap: return "char";
    case EditStrategy::homoglyph: return "homo";
  }
  return "unknown";
}

CandidateText CandidateText::unedited(std::u32string original) {
  return CandidateText{std::move(original), {}};
}

bool CandidateText::edited_at(std::size_t position) const {
  return std::any_of(edits.begin(), edits.end(),
                     [&](const Edit& e) { return e.position == position; });
}

std::string CandidateText::strategy_label() const {
  if (edits.empty()) return "none";
  const EditStrategy first = edits.front().strategy;
  const bool uniform = std::all_of(edits.begin(), edits.end(),
                                   [&](const Edit& e) { return e.strategy == first; });
  return uniform ? strategy_name(first) : "mixed";
}

CandidateText apply_edit(const CandidateText& text, std::size_t position, char32_t replacement,
                         EditStrategy strategy, const EditRules& rules) {
  if (position >= text.chars.size()) {
    throw std::out_of_range("edit position " + std::to_string(position) +
                            " outside text of length " + std::to_string(text.chars.size()));
  }
  const char32_t current = text.chars[position];
  if (replacement == current) {
    throw AttackError("no-op edit at position " + std::to_string(position));
  }
  if (text.edited_at(position)) {
    throw AttackError("position " + std::to_string(position) + " was already edited");
  }
  switch (strategy) {
    case EditStrategy::char_swap:
      if (!rules.in_vocabulary || !rules.in_vocabulary(replacement)) {
        throw AttackError("replacement " + utf8::codepoint_label(replacement) +
                          " is outside the vocabulary");
      }
      break;
    case EditStrategy::homoglyph: {
      const auto options =
          rules.homoglyphs ? rules.homoglyphs->lookup(current) : std::span<const char32_t>{};
      if (std::find(options.begin(), options.end(), replacement) == options.end()) {
        throw AttackError(utf8::codepoint_label(replacement) + " is not a homoglyph of " +
                          utf8::codepoint_label(current));
      }
      break;
    }
    case EditStrategy::none:
      throw AttackError("edit requires a strategy");
  }
  CandidateText out = text;
  out.chars[position] = replacement;
  Edit edit{position, current, replacement, strategy};
  auto at = std::lower_bound(out.edits.begin(), out.edits.end(), position,
                             [](const Edit& e, std::size_t p) { return e.position < p; });
  out.edits.insert(at, edit);
  return out;
}

std::size_t replacement_budget(std::size_t length, double ratio) {
  if (length == 0) throw ConfigError("replacement budget needs a nonempty text");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("replacement ratio must lie in (0, 1]");
  // The product is snapped to the nearest 1e-9 first so that e.g.
  // 0.07 * 100 (7.000000000000001 in binary) yields 7 and not 8.
  const double raw = ratio * static_cast<double>(length);
  const double snapped = std::round(raw * 1e9) / 1e9;
  const auto budget = static_cast<std::size_t>(std::ceil(snapped));
  return std::max<std::size_t>(1, budget);
}

std::u32string apply_edits(const std::u32string& original, const std::vector<Edit>& edits) {
  std::u32string out = original;
  for (const Edit& e : edits) {
    if (e.position >= out.size() || out[e.position] != e.old_char) {
      throw AttackError("edit at " + std::to_string(e.position) + " does not match the text");
    }
    out[e.position] = e.new_char;
  }
  return out;
}

std::u32string revert_edits(const std::u32string& candidate, const std::vector<Edit>& edits) {
  std::u32string out = candidate;
  for (const Edit& e : edits) {
    if (e.position >= out.size() || out[e.position] != e.new_char) {
      throw AttackError("edit at " + std::to_string(e.position) + " does not match the candidate");
    }
    out[e.position] = e.old_char;
  }
  return out;
}

std::size_t hamming_distance(const std::u32string& a, const std::u32string& b) {
  if (a.size() != b.size()) throw ShapeError("hamming distance needs equal lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace sponge
