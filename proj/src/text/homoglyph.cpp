#include "sponge/text/homoglyph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sponge/error.hpp"
#include "sponge/text/utf8.hpp"

namespace sponge {
namespace {

constexpr std::string_view kBuiltinJson =
#include "builtin_homoglyphs.inc"
    ;

char32_t single_codepoint(const std::string& text, const std::string& context) {
  std::u32string decoded;
  try {
    decoded = utf8::decode(text);
  } catch (const SchemaError& e) {
    throw SchemaError("homoglyph table: " + context + ": " + e.what());
  }
  if (decoded.size() != 1) {
    throw SchemaError("homoglyph table: " + context + " must be exactly one character, got \"" +
                      text + "\"");
  }
  return decoded[0];
}

}  // namespace

HomoglyphTable::HomoglyphTable(Map entries) : entries_(std::move(entries)) {
  for (const auto& [key, replacements] : entries_) {
    const std::string name = "'" + utf8::encode(key) + "' (" + utf8::codepoint_label(key) + ")";
    if (replacements.empty()) {
      throw SchemaError("homoglyph table: empty replacement list for " + name);
    }
    std::set<char32_t> seen;
    for (char32_t r : replacements) {
      if (r == key) throw SchemaError("homoglyph table: " + name + " maps to itself");
      if (!seen.insert(r).second) {
        throw SchemaError("homoglyph table: duplicate replacement " + utf8::codepoint_label(r) +
                          " for " + name);
      }
    }
  }
  for (char32_t c = U'a'; c <= U'z'; ++c) {
    for (char32_t letter : {c, static_cast<char32_t>(c - U'a' + U'A')}) {
      if (!entries_.count(letter)) {
        throw SchemaError("homoglyph table: no entry for letter '" + utf8::encode(letter) + "'");
      }
    }
  }
}

const HomoglyphTable& HomoglyphTable::builtin() {
  static const HomoglyphTable table = parse(kBuiltinJson);
  return table;
}

HomoglyphTable HomoglyphTable::parse(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("homoglyph table: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("homoglyph table: top level must be an object");
  Map entries;
  for (const auto& [key_text, list] : doc.items()) {
    const char32_t key = single_codepoint(key_text, "key \"" + key_text + "\"");
    if (!list.is_array()) {
      throw SchemaError("homoglyph table: entry for '" + key_text + "' must be an array");
    }
    std::vector<char32_t> replacements;
    for (const auto& item : list) {
      if (!item.is_string()) {
        throw SchemaError("homoglyph table: entry for '" + key_text + "' holds a non-string");
      }
      replacements.push_back(
          single_codepoint(item.get<std::string>(), "replacement for '" + key_text + "'"));
    }
    entries[key] = std::move(replacements);
  }
  return HomoglyphTable(std::move(entries));
}

HomoglyphTable HomoglyphTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open homoglyph table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::span<const char32_t> HomoglyphTable::lookup(char32_t c) const {
  auto it = entries_.find(c);
  if (it == entries_.end()) return {};
  return it->second;
}

std::vector<std::pair<char32_t, char32_t>> HomoglyphTable::replacement_sources() const {
  std::vector<std::pair<char32_t, char32_t>> out;
  std::set<char32_t> seen;
  for (const auto& [key, replacements] : entries_) {
    for (char32_t r : replacements) {
      if (seen.insert(r).second) out.emplace_back(r, key);
    }
  }
  return out;
}

}  // namespace sponge
