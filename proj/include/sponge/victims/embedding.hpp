#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sponge/autodiff/tensor.hpp"

namespace sponge {

using TokenId = std::uint32_t;

struct VocabEntry {
  char32_t character = 0;
  // Set for characters added as homoglyph clones of a base character.
  std::optional<char32_t> clone_of;

  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

// Character vocabulary and its |V| x d_text embedding matrix E.
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<VocabEntry> entries, Tensor matrix);

  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return matrix_.shape()[1]; }

  std::optional<TokenId> find(char32_t c) const;
  // Throws VocabularyError naming the character.
  TokenId id(char32_t c) const;
  bool contains(char32_t c) const { return index_.count(c) != 0; }

  char32_t character(TokenId id) const { return entries_.at(id).character; }
  bool is_base(TokenId id) const { return !entries_.at(id).clone_of.has_value(); }
  std::span<const double> row(TokenId id) const;

  // Token ids of the base (non-clone) vocabulary in table order.
  const std::vector<TokenId>& base_ids() const { return base_ids_; }

  std::vector<TokenId> encode(std::u32string_view text) const;
  // Distinct characters of `text` missing from the vocabulary, in order of appearance.
  std::vector<char32_t> unknown_characters(std::u32string_view text) const;

  const std::vector<VocabEntry>& entries() const { return entries_; }
  const Tensor& matrix() const { return matrix_; }

 private:
  std::vector<VocabEntry> entries_;
  Tensor matrix_;
  std::unordered_map<char32_t, TokenId> index_;
  std::vector<TokenId> base_ids_;
};

}  // namespace sponge
