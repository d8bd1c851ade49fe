#include <doctest.h>

#include <sstream>

#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/text/candidate.hpp"
#include "sponge/text/corpus.hpp"
#include "sponge/text/homoglyph.hpp"
#include "sponge/text/utf8.hpp"

using namespace sponge;

namespace {

EditRules ascii_rules(const HomoglyphTable* table = &HomoglyphTable::builtin()) {
  return {[](char32_t c) { return c >= 0x20 && c <= 0x7E; }, table};
}

}  // namespace

TEST_CASE("builtin homoglyph table covers ASCII letters") {
  const auto& table = HomoglyphTable::builtin();
  for (char32_t c = U'a'; c <= U'z'; ++c) CHECK_FALSE(table.lookup(c).empty());
  for (char32_t c = U'A'; c <= U'Z'; ++c) CHECK_FALSE(table.lookup(c).empty());
  for (const auto& [key, list] : table.entries()) {
    for (char32_t r : list) CHECK(r != key);
  }
  CHECK(table.lookup(U'▲').empty());
  CHECK_FALSE(table.contains(U'▲'));
}

TEST_CASE("homoglyph table parsing rejects bad entries") {
  std::string letters;
  for (char c = 'a'; c <= 'z'; ++c) letters += std::string("\"") + c + "\": [\"а\"],";
  for (char c = 'A'; c <= 'Z'; ++c) letters += std::string("\"") + c + "\": [\"А\"],";
  CHECK_NOTHROW(HomoglyphTable::parse("{" + letters.substr(0, letters.size() - 1) + "}"));
  CHECK_THROWS_AS(HomoglyphTable::parse("{" + letters + "\"x\": [\"x\"]}"), SchemaError);
  CHECK_THROWS_AS(HomoglyphTable::parse("{" + letters + "\"1\": []}"), SchemaError);
  CHECK_THROWS_AS(HomoglyphTable::parse("{\"a\": [\"а\"]}"), SchemaError);  // coverage
  CHECK_THROWS_AS(HomoglyphTable::parse("{not json"), SchemaError);
  try {
    HomoglyphTable::parse("{" + letters + "\"q\": [\"q\"]}");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("q") != std::string::npos);
  }
}

TEST_CASE("apply_edit substitutes one position") {
  const auto rules = ascii_rules();
  const auto text = CandidateText::unedited(U"I HAVE A PUPPY");
  const auto edited = apply_edit(text, 4, U'T', EditStrategy::char_swap, rules);
  CHECK(utf8::encode(edited.chars) == "I HATE A PUPPY");
  REQUIRE(edited.edits.size() == 1);
  CHECK(edited.edits[0] == Edit{4, U'V', U'T', EditStrategy::char_swap});

  CHECK_THROWS_AS(apply_edit(text, 4, U'V', EditStrategy::char_swap, rules), AttackError);
  CHECK_THROWS_AS(apply_edit(text, 14, U'T', EditStrategy::char_swap, rules), std::out_of_range);
  CHECK_THROWS_AS(apply_edit(edited, 4, U'X', EditStrategy::char_swap, rules), AttackError);
  // Outside the vocabulary, and a homoglyph that is not listed for the letter.
  CHECK_THROWS_AS(apply_edit(text, 4, U'é', EditStrategy::char_swap, rules), AttackError);
  CHECK_THROWS_AS(apply_edit(text, 4, U'T', EditStrategy::homoglyph, rules), AttackError);
}

TEST_CASE("homoglyph edit keeps the visible text") {
  const auto rules = ascii_rules();
  const auto& table = HomoglyphTable::builtin();
  const auto text = CandidateText::unedited(U"I HAVE A PUPPY");
  const char32_t glyph = table.lookup(U'V').front();
  const auto edited = apply_edit(text, 4, glyph, EditStrategy::homoglyph, rules);
  CHECK(edited.chars.size() == text.chars.size());
  CHECK(hamming_distance(edited.chars, text.chars) == 1);
  CHECK(edited.strategy_label() == "homo");
  CHECK(utf8::is_valid(utf8::encode(edited.chars)));
}

TEST_CASE("replacement budget") {
  CHECK(replacement_budget(140, 0.05) == 7);
  CHECK(replacement_budget(3, 0.05) == 1);
  CHECK(replacement_budget(20, 1.0) == 20);
  CHECK(replacement_budget(20, 0.05) == 1);
  CHECK(replacement_budget(21, 0.05) == 2);
}

TEST_CASE("edits round trip") {
  const auto rules = ascii_rules();
  Rng rng(5);
  const std::u32string original = U"The quick brown fox jumps over the lazy dog.";
  for (int trial = 0; trial < 50; ++trial) {
    auto cand = CandidateText::unedited(original);
    for (int k = 0; k < 4; ++k) {
      const std::size_t pos = rng.index(original.size());
      if (cand.edited_at(pos)) continue;
      const char32_t c = static_cast<char32_t>(0x21 + rng.index(0x5E));
      if (c == cand.chars[pos]) continue;
      cand = apply_edit(cand, pos, c, EditStrategy::char_swap, rules);
    }
    CHECK(apply_edits(original, cand.edits) == cand.chars);
    CHECK(revert_edits(cand.chars, cand.edits) == original);
    CHECK(hamming_distance(original, cand.chars) == cand.edits.size());
    for (std::size_t i = 1; i < cand.edits.size(); ++i) {
      CHECK(cand.edits[i - 1].position < cand.edits[i].position);
    }
  }
}

TEST_CASE("utf8 codec") {
  const std::u32string text = U"aа\U0001D449!";
  const auto bytes = utf8::encode(text);
  CHECK(bytes.size() == 1 + 2 + 4 + 1);
  CHECK(utf8::decode(bytes) == text);
  CHECK_FALSE(utf8::is_valid("\xC0\xAF"));      // overlong
  CHECK_FALSE(utf8::is_valid("\xED\xA0\x80"));  // surrogate
  CHECK_FALSE(utf8::is_valid("\xE2\x82"));      // truncated
  CHECK_THROWS_AS(utf8::decode("\xFF"), SchemaError);
  CHECK(utf8::codepoint_label(U'А') == "U+0410");
}

TEST_CASE("corpus parsing") {
  std::istringstream in(
      "first line\n"
      "\n"
      "{\"id\": \"u7\", \"text\": \"record line\", \"speaker_ref\": \"spk3\"}\n"
      "caf\xC3\xA9\n");
  const auto corpus = parse_corpus(in, "inline");
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].id == "1");
  CHECK(corpus[0].chars == U"first line");
  CHECK(corpus[1].id == "u7");
  CHECK(corpus[1].speaker_ref == "spk3");
  CHECK(corpus[2].id == "4");
  CHECK(corpus[2].chars.size() == 4);

  std::istringstream bad("{\"text\": 3}\n");
  CHECK_THROWS_AS(parse_corpus(bad, "inline"), SchemaError);
}

TEST_CASE("shipped corpus") {
  const auto corpus = load_corpus(SPONGE_DATA_DIR "/corpus_synthetic.txt");
  CHECK(corpus.size() >= 50);
  for (const auto& u : corpus) CHECK_FALSE(u.chars.empty());
}
