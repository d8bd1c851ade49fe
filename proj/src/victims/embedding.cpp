#include "sponge/victims/embedding.hpp"

#include <algorithm>

#include "sponge/error.hpp"
#include "sponge/text/utf8.hpp"

namespace sponge {

EmbeddingTable::EmbeddingTable(std::vector<VocabEntry> entries, Tensor matrix)
    : entries_(std::move(entries)), matrix_(std::move(matrix)) {
  if (matrix_.rank() != 2 || matrix_.shape()[0] != entries_.size()) {
    throw ShapeError("embedding matrix shape " + shape_to_string(matrix_.shape()) +
                     " does not match a vocabulary of " + std::to_string(entries_.size()));
  }
  if (matrix_.shape()[1] < 2) throw ShapeError("embedding dimension must be at least 2");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const char32_t c = entries_[i].character;
    if (!index_.emplace(c, static_cast<TokenId>(i)).second) {
      throw SchemaError("vocabulary lists " + utf8::codepoint_label(c) + " twice");
    }
    if (!entries_[i].clone_of) base_ids_.push_back(static_cast<TokenId>(i));
  }
}

std::optional<TokenId> EmbeddingTable::find(char32_t c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId EmbeddingTable::id(char32_t c) const {
  if (auto found = find(c)) return *found;
  throw VocabularyError("character '" + utf8::encode(c) + "' (" + utf8::codepoint_label(c) +
                            ") is not in the victim vocabulary",
                        c);
}

std::span<const double> EmbeddingTable::row(TokenId id) const {
  if (id >= entries_.size()) throw VocabularyError("token id out of range", 0);
  return matrix_.data().subspan(static_cast<std::size_t>(id) * dim(), dim());
}

std::vector<TokenId> EmbeddingTable::encode(std::u32string_view text) const {
  std::vector<TokenId> ids;
  ids.reserve(text.size());
  for (char32_t c : text) ids.push_back(id(c));
  return ids;
}

std::vector<char32_t> EmbeddingTable::unknown_characters(std::u32string_view text) const {
  std::vector<char32_t> missing;
  for (char32_t c : text) {
    if (!contains(c) && std::find(missing.begin(), missing.end(), c) == missing.end()) {
      missing.push_back(c);
    }
  }
  return missing;
}

}  // namespace sponge
