#pragma once

// Rule tokenizer, entity tagging and integer encoding.
//
// Tokenizer rules, applied to the lowercased text split on whitespace:
//   * URLs (scheme:// or leading www.) and paths (leading / or ~ and
//     containing /) are kept whole, minus trailing punctuation;
//   * emoticons such as :) ;-) :d are kept whole, also when glued to the
//     end of a word ("raid:)" -> raid :));
//   * leading and trailing characters from .,:;!?()"' become tokens;
//   * clitics are split off PTB style: don't -> do n't, it's -> it 's.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dyadic/disentangle.hpp"

namespace dyadic {

using TokenSequence = std::vector<std::string>;

namespace tags {
inline constexpr std::string_view url = "__url__";
inline constexpr std::string_view path = "__path__";
inline constexpr std::string_view name = "__name__";
inline constexpr std::string_view location = "__location__";
inline constexpr std::string_view organization = "__organization__";
}  // namespace tags

bool is_url(std::string_view token);
bool is_path(std::string_view token);
bool is_emoticon(std::string_view token);

TokenSequence tokenize(std::string_view text);

struct Gazetteers {
  WordSet locations;
  WordSet organizations;
};

/// Replaces URLs, paths, roster names and gazetteer entries with generic
/// tags. Never changes the sequence length.
TokenSequence tag_entities(TokenSequence seq, const UsernameRoster& roster,
                           const Gazetteers* gazetteers = nullptr);

// tokenize + tag_entities with an empty roster (URL and path tags only).
TokenSequence preprocess(std::string_view text);
TokenSequence preprocess(std::string_view text, const UsernameRoster& roster);

std::string join_tokens(std::span<const std::string> tokens);

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();
  // Tokens in index order, starting after the two reserved entries.
  explicit Vocabulary(std::span<const std::string> tokens);

  std::int32_t index_of(std::string_view token) const;
  const std::string& token(std::int32_t index) const { return tokens_.at(index); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Tokens with frequency >= min_count, by descending frequency then
/// lexicographically.
Vocabulary build_vocab(std::span<const TokenSequence> corpus, std::size_t min_count);

enum class Truncate { keep_last, keep_first };

std::vector<std::int32_t> encode(std::span<const std::string> seq, const Vocabulary& vocab,
                                 std::size_t max_len, Truncate keep = Truncate::keep_last);
TokenSequence decode(std::span<const std::int32_t> ids, const Vocabulary& vocab);

}  // namespace dyadic
