#pragma once

#include <string>
#include <string_view>

namespace sponge::utf8 {

// Strict decoder: rejects overlong forms, surrogates, values above U+10FFFF
// and truncated sequences with a SchemaError giving the byte offset.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view text);
std::string encode(char32_t c);

bool is_valid(std::string_view bytes);

// "U+0410" style label, used in diagnostics.
std::string codepoint_label(char32_t c);

}  // namespace sponge::utf8
