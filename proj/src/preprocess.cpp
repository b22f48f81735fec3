#include "dyadic/preprocess.hpp"

#include <algorithm>
#include <array>

namespace dyadic {

namespace {

constexpr std::string_view kPunct = ".,:;!?()\"'";

bool is_punct(char c) { return kPunct.find(c) != std::string_view::npos; }

bool is_scheme_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '+' || c == '-' || c == '.';
}

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

constexpr std::array<std::string_view, 6> kApostropheClitics = {"'s", "'re", "'ve",
                                                                 "'ll", "'m", "'d"};

bool is_clitic(std::string_view tok) {
  if (tok == "n't") return true;
  return std::find(kApostropheClitics.begin(), kApostropheClitics.end(), tok) !=
         kApostropheClitics.end();
}

bool is_eyes(char c) { return c == ':' || c == ';' || c == '='; }
bool is_nose(char c) { return c == '-' || c == 'o' || c == '^' || c == '\''; }
bool is_mouth(char c) {
  return std::string_view(")(][dpo/\\|*3$@").find(c) != std::string_view::npos;
}

// eyes [nose] mouth+
bool matches_emoticon(std::string_view s) {
  if (s.size() < 2 || !is_eyes(s[0])) return false;
  auto all_mouth = [](std::string_view m) {
    return !m.empty() && std::all_of(m.begin(), m.end(), is_mouth);
  };
  return all_mouth(s.substr(1)) || (is_nose(s[1]) && all_mouth(s.substr(2)));
}

// Length of the longest emoticon that ends `tok`, or 0.
std::size_t emoticon_suffix(std::string_view tok) {
  for (std::size_t k = 0; k + 1 < tok.size(); ++k)
    if (matches_emoticon(tok.substr(k))) return tok.size() - k;
  return 0;
}

void split_clitics(std::string_view core, TokenSequence& out) {
  if (core.size() > 3 && core.ends_with("n't")) {
    out.emplace_back(core.substr(0, core.size() - 3));
    out.emplace_back("n't");
    return;
  }
  for (auto clitic : kApostropheClitics) {
    if (core.size() > clitic.size() && core.ends_with(clitic)) {
      out.emplace_back(core.substr(0, core.size() - clitic.size()));
      out.emplace_back(clitic);
      return;
    }
  }
  out.emplace_back(core);
}

bool keep_whole(std::string_view tok) {
  return is_url(tok) || is_path(tok) || is_emoticon(tok) || is_clitic(tok);
}

void tokenize_word(std::string_view tok, TokenSequence& out) {
  while (!tok.empty() && is_punct(tok.front()) && !keep_whole(tok)) {
    out.emplace_back(1, tok.front());
    tok.remove_prefix(1);
  }
  std::vector<std::string_view> trailing;
  while (!tok.empty()) {
    if (is_url(tok) || is_path(tok)) {
      while (tok.size() > 1 && is_punct(tok.back())) {
        trailing.push_back(tok.substr(tok.size() - 1));
        tok.remove_suffix(1);
      }
      break;
    }
    if (is_emoticon(tok) || is_clitic(tok)) break;
    if (std::size_t n = emoticon_suffix(tok); n > 0 && n < tok.size()) {
      trailing.push_back(tok.substr(tok.size() - n));
      tok.remove_suffix(n);
      continue;
    }
    if (is_punct(tok.back())) {
      trailing.push_back(tok.substr(tok.size() - 1));
      tok.remove_suffix(1);
      continue;
    }
    break;
  }
  if (!tok.empty()) {
    if (keep_whole(tok))
      out.emplace_back(tok);
    else
      split_clitics(tok, out);
  }
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.emplace_back(*it);
}

}  // namespace

bool is_url(std::string_view tok) {
  if (tok.starts_with("www.") && tok.size() > 4) return true;
  auto sep = tok.find("://");
  if (sep == std::string_view::npos || sep == 0 || sep + 3 >= tok.size()) return false;
  return std::all_of(tok.begin(), tok.begin() + static_cast<std::ptrdiff_t>(sep), is_scheme_char);
}

bool is_path(std::string_view tok) {
  if (tok.size() < 2) return false;
  if (tok.front() != '/' && tok.front() != '~') return false;
  if (tok.front() == '~' && tok.find('/') == std::string_view::npos) return false;
  // "//" alone or "/." are punctuation noise, not paths.
  return std::any_of(tok.begin() + 1, tok.end(), [](char c) { return is_alnum(c) || c == '_'; });
}

bool is_emoticon(std::string_view tok) {
  if (tok == "<3") return true;
  return tok.size() >= 2 && emoticon_suffix(tok) == tok.size();
}

TokenSequence tokenize(std::string_view text) {
  const std::string lower = to_lower(text);
  TokenSequence out;
  for (auto word : split_whitespace(lower)) tokenize_word(word, out);
  return out;
}

TokenSequence tag_entities(TokenSequence seq, const UsernameRoster& roster,
                           const Gazetteers* gazetteers) {
  for (auto& tok : seq) {
    if (is_url(tok)) {
      tok = tags::url;
    } else if (is_path(tok)) {
      tok = tags::path;
    } else if (roster.contains(tok)) {
      tok = tags::name;
    } else if (gazetteers && gazetteers->locations.contains(tok)) {
      tok = tags::location;
    } else if (gazetteers && gazetteers->organizations.contains(tok)) {
      tok = tags::organization;
    }
  }
  return seq;
}

TokenSequence preprocess(std::string_view text) {
  static const UsernameRoster kEmpty;
  return tag_entities(tokenize(text), kEmpty);
}

TokenSequence preprocess(std::string_view text, const UsernameRoster& roster) {
  return tag_entities(tokenize(text), roster);
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

Vocabulary::Vocabulary(std::span<const std::string> tokens) : Vocabulary() {
  for (const auto& t : tokens) {
    if (index_.count(t)) throw ValidationError("duplicate vocabulary token: " + t);
    add(t);
  }
}

void Vocabulary::add(std::string token) {
  index_.emplace(token, static_cast<std::int32_t>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

std::int32_t Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

Vocabulary build_vocab(std::span<const TokenSequence> corpus, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus)
    for (const auto& tok : seq) ++counts[tok];
  counts.erase(std::string(Vocabulary::kPadToken));
  counts.erase(std::string(Vocabulary::kUnkToken));

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts)
    if (n >= min_count) kept.emplace_back(tok, n);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [tok, n] : kept) tokens.push_back(tok);
  return Vocabulary(tokens);
}

std::vector<std::int32_t> encode(std::span<const std::string> seq, const Vocabulary& vocab,
                                 std::size_t max_len, Truncate keep) {
  if (seq.size() > max_len) {
    seq = keep == Truncate::keep_last ? seq.subspan(seq.size() - max_len)
                                      : seq.subspan(0, max_len);
  }
  std::vector<std::int32_t> ids;
  ids.reserve(seq.size());
  for (const auto& tok : seq) ids.push_back(vocab.index_of(tok));
  return ids;
}

TokenSequence decode(std::span<const std::int32_t> ids, const Vocabulary& vocab) {
  TokenSequence out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(vocab.token(id));
  return out;
}

}  // namespace dyadic
