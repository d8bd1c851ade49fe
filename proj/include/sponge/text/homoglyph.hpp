#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sponge {

// Character -> ordered list of visually confusable replacements.
//
// Invariants (checked on every construction path): no character maps to
// itself, no list is empty or repeats an entry, and every ASCII letter has an
// entry.
class HomoglyphTable {
 public:
  using Map = std::map<char32_t, std::vector<char32_t>>;

  explicit HomoglyphTable(Map entries);

  // Table shipped inside the binary (data/homoglyphs.json at build time).
  static const HomoglyphTable& builtin();
  // JSON object {"a": ["ɑ", ...], ...}, UTF-8.
  static HomoglyphTable parse(std::string_view json_text);
  static HomoglyphTable load(const std::filesystem::path& path);

  // Empty span on a table miss.
  std::span<const char32_t> lookup(char32_t c) const;
  bool contains(char32_t c) const { return entries_.count(c) != 0; }
  const Map& entries() const { return entries_; }

  // Every distinct replacement character, each paired with the first key
  // (in code point order) that lists it.
  std::vector<std::pair<char32_t, char32_t>> replacement_sources() const;

 private:
  Map entries_;
};

}  // namespace sponge
