#include "dyadic/disentangle.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

namespace dyadic {

void UsernameRoster::add(std::string_view nick) {
  if (nick.empty()) return;
  names_.emplace(to_lower(nick), std::string(nick));
}

bool UsernameRoster::contains(std::string_view nick) const {
  return names_.find(to_lower(nick)) != names_.end();
}

std::optional<std::string> UsernameRoster::canonical(std::string_view nick) const {
  auto it = names_.find(to_lower(nick));
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

UsernameRoster build_roster(std::span<const ChannelDay> history, int window_days) {
  UsernameRoster roster(window_days);
  if (history.empty()) return roster;
  auto latest = std::max_element(history.begin(), history.end(),
                                 [](const ChannelDay& a, const ChannelDay& b) {
                                   return std::chrono::sys_days{a.day} <
                                          std::chrono::sys_days{b.day};
                                 });
  const auto newest = std::chrono::sys_days{latest->day};
  const auto oldest = newest - std::chrono::days{window_days};
  for (const auto& day : history) {
    const auto d = std::chrono::sys_days{day.day};
    if (d < oldest || d > newest) continue;
    for (const auto& msg : day.messages) roster.add(msg.sender);
  }
  return roster;
}

WordSet WordSet::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::set<std::string> words;
  for (auto w : split_whitespace(text)) words.insert(to_lower(w));
  return WordSet(std::move(words));
}

WordSet WordSet::default_common_words() {
  static const char* const kWords[] = {
      "a",      "about",  "after",  "again",  "all",    "also",   "am",     "an",
      "and",    "any",    "anyone", "are",    "as",     "ask",    "at",     "back",
      "be",     "because", "been",  "before", "but",    "by",     "can",    "come",
      "could",  "day",    "did",    "do",     "does",   "done",   "down",   "even",
      "find",   "first",  "for",    "from",   "get",    "give",   "go",     "good",
      "got",    "had",    "has",    "have",   "he",     "hello",  "help",   "her",
      "here",   "hey",    "hi",     "him",    "his",    "how",    "i",      "if",
      "in",     "into",   "is",     "it",     "its",    "just",   "know",   "like",
      "look",   "make",   "man",    "me",     "more",   "most",   "my",     "need",
      "new",    "no",     "not",    "now",    "of",     "off",    "ok",     "okay",
      "on",     "one",    "only",   "or",     "other",  "our",    "out",    "over",
      "please", "right",  "run",    "said",   "say",    "see",    "she",    "should",
      "so",     "some",   "sorry",  "start",  "still",  "stop",   "sure",   "take",
      "than",   "thank",  "thanks", "that",   "the",    "their",  "them",   "then",
      "there",  "these",  "they",   "think",  "this",   "time",   "to",     "try",
      "two",    "up",     "us",     "use",    "very",   "want",   "was",    "way",
      "we",     "well",   "what",   "when",   "where",  "which",  "who",    "why",
      "will",   "with",   "work",   "would",  "yeah",   "yes",    "you",    "your",
  };
  return WordSet(std::set<std::string>(std::begin(kWords), std::end(kWords)));
}

namespace {

std::string_view strip_mention_punct(std::string_view token) {
  while (!token.empty() && (token.back() == ':' || token.back() == ',' || token.back() == '.'))
    token.remove_suffix(1);
  return token;
}

std::optional<std::string> match_mention(std::string_view token, std::string_view sender,
                                         const UsernameRoster& roster,
                                         const WordSet& common_words) {
  std::string_view name = strip_mention_punct(token);
  if (name.empty()) return std::nullopt;
  const std::string lower = to_lower(name);
  if (common_words.contains(lower) || lower == to_lower(sender)) return std::nullopt;
  return roster.canonical(name);
}

}  // namespace

AddressedMessage identify_recipient(const RawMessage& msg, const UsernameRoster& roster,
                                    const WordSet& common_words, const RecipientOptions& opts) {
  AddressedMessage out{msg.day, msg.minute, msg.sender, std::nullopt,
                       std::string(trim(msg.body))};
  const std::string_view body = trim(msg.body);
  const auto tokens = split_whitespace(body);
  if (tokens.empty()) return out;

  if (auto who = match_mention(tokens.front(), msg.sender, roster, common_words)) {
    out.recipient = std::move(who);
    const std::size_t end = static_cast<std::size_t>(tokens.front().data() - body.data()) +
                            tokens.front().size();
    out.utterance = std::string(trim(body.substr(end)));
    return out;
  }
  if (opts.match_last_token && tokens.size() > 1) {
    std::string_view last = tokens.back();
    while (!last.empty() && (last.back() == '!' || last.back() == '?')) last.remove_suffix(1);
    if (auto who = match_mention(last, msg.sender, roster, common_words)) {
      out.recipient = std::move(who);
      const std::size_t begin = static_cast<std::size_t>(tokens.back().data() - body.data());
      out.utterance = std::string(trim(body.substr(0, begin)));
    }
  }
  return out;
}

namespace {

std::pair<std::string, std::string> pair_key(std::string_view a, std::string_view b) {
  std::string la = to_lower(a), lb = to_lower(b);
  if (lb < la) std::swap(la, lb);
  return {la, lb};
}

bool same_nick(std::string_view a, std::string_view b) { return to_lower(a) == to_lower(b); }

}  // namespace

std::vector<DialogueCandidate> extract_dialogues(std::span<const AddressedMessage> day,
                                                 int window_mins) {
  std::vector<DialogueCandidate> candidates;
  std::map<std::pair<std::string, std::string>, std::size_t> open;

  for (std::size_t i = 0; i < day.size(); ++i) {
    const AddressedMessage& msg = day[i];
    if (!msg.recipient) continue;
    auto key = pair_key(msg.sender, *msg.recipient);
    if (auto it = open.find(key); it != open.end()) {
      candidates[it->second].members.push_back(i);
      continue;
    }

    // First response: search back for the addressee's initial question.
    DialogueCandidate cand{{*msg.recipient, msg.sender}, {}};
    const std::int64_t t_resp = absolute_minute(msg.day, msg.minute);
    for (std::size_t j = i; j-- > 0;) {
      const AddressedMessage& prev = day[j];
      if (t_resp - absolute_minute(prev.day, prev.minute) > window_mins) break;
      if (!prev.recipient && same_nick(prev.sender, *msg.recipient)) {
        cand.members.push_back(j);
        break;
      }
    }
    cand.members.push_back(i);
    open.emplace(std::move(key), candidates.size());
    candidates.push_back(std::move(cand));
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const DialogueCandidate& a, const DialogueCandidate& b) {
                     return a.members.front() < b.members.front();
                   });
  return candidates;
}

DialogueCandidate fill_holes(const DialogueCandidate& candidate,
                             std::span<const AddressedMessage> day) {
  DialogueCandidate out = candidate;
  if (candidate.members.empty()) return out;
  const std::size_t first = candidate.members.front();
  const std::size_t last = std::min(candidate.members.back(), day.size() - 1);

  for (int p = 0; p < 2; ++p) {
    const std::string& self = candidate.participants[p];
    const std::string& partner = candidate.participants[1 - p];

    // Talking to someone else means exchanging an addressed message with a
    // third party inside the candidate's span, in either direction.
    bool busy = false;
    for (std::size_t k = first; k <= last && !busy; ++k) {
      const AddressedMessage& m = day[k];
      if (!m.recipient) continue;
      if (same_nick(m.sender, self) && !same_nick(*m.recipient, partner)) busy = true;
      if (same_nick(*m.recipient, self) && !same_nick(m.sender, partner)) busy = true;
    }
    if (busy) continue;
    for (std::size_t k = first; k <= last; ++k)
      if (!day[k].recipient && same_nick(day[k].sender, self)) out.members.push_back(k);
  }
  std::sort(out.members.begin(), out.members.end());
  out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  return out;
}

MergedCandidate merge_consecutive(const DialogueCandidate& candidate,
                                  std::span<const AddressedMessage> day) {
  MergedCandidate out;
  out.participants = candidate.participants;
  for (std::size_t idx : candidate.members) {
    const AddressedMessage& m = day[idx];
    if (m.utterance.empty()) continue;
    const int who = same_nick(m.sender, candidate.participants[0]) ? 0 : 1;
    ++out.utterances[who];
    if (!out.turns.empty() && same_nick(out.turns.back().sender, m.sender)) {
      Turn& t = out.turns.back();
      t.text += ' ';
      t.text += m.utterance;
      if (t.recipient.empty() && m.recipient) t.recipient = *m.recipient;
      continue;
    }
    out.turns.push_back({m.day, m.minute, m.sender, m.recipient.value_or(""), m.utterance});
  }
  return out;
}

FilterVerdict filter_dialogue(const MergedCandidate& candidate, const FilterConfig& cfg) {
  if (candidate.turns.size() < std::max<std::size_t>(cfg.min_turns, 2))
    return FilterVerdict::too_few_turns;
  const std::size_t n = candidate.utterance_count();
  if (n > cfg.dominance_len) {
    const std::size_t top = std::max(candidate.utterances[0], candidate.utterances[1]);
    if (static_cast<double>(top) > cfg.dominance_frac * static_cast<double>(n))
      return FilterVerdict::dominated;
  }
  return FilterVerdict::accepted;
}

DisentangleTally& DisentangleTally::operator+=(const DisentangleTally& o) {
  days += o.days;
  messages += o.messages;
  candidates += o.candidates;
  accepted += o.accepted;
  rejected_min_turns += o.rejected_min_turns;
  rejected_dominance += o.rejected_dominance;
  return *this;
}

DisentangleResult disentangle_day(const ChannelDay& day, const UsernameRoster& roster,
                                  const WordSet& common_words, const DisentangleConfig& cfg) {
  DisentangleResult result;
  result.tally.days = 1;
  result.tally.messages = day.messages.size();

  std::vector<AddressedMessage> stream;
  stream.reserve(day.messages.size());
  for (const auto& msg : day.messages)
    stream.push_back(identify_recipient(msg, roster, common_words, cfg.recipient));

  const auto candidates = extract_dialogues(stream, cfg.window_mins);
  result.tally.candidates = candidates.size();
  for (const auto& cand : candidates) {
    MergedCandidate merged = merge_consecutive(fill_holes(cand, stream), stream);
    switch (filter_dialogue(merged, cfg.filter)) {
      case FilterVerdict::too_few_turns:
        ++result.tally.rejected_min_turns;
        continue;
      case FilterVerdict::dominated:
        ++result.tally.rejected_dominance;
        continue;
      case FilterVerdict::accepted:
        break;
    }
    char ordinal[16];
    std::snprintf(ordinal, sizeof(ordinal), "%04zu", result.dialogues.size());
    result.dialogues.push_back({day.channel + "/" + format_date(day.day) + "/" + ordinal,
                                merged.participants, std::move(merged.turns), day.channel,
                                day.day});
  }
  result.tally.accepted = result.dialogues.size();
  return result;
}

DisentangleResult disentangle_channel(std::span<const ChannelDay> days,
                                      const WordSet& common_words,
                                      const DisentangleConfig& cfg) {
  std::vector<std::size_t> order(days.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::chrono::sys_days{days[a].day} < std::chrono::sys_days{days[b].day};
  });

  DisentangleResult all;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const ChannelDay& today = days[order[pos]];
    // Same rule as build_roster, without copying the history days.
    UsernameRoster roster(cfg.prev_days);
    for (std::size_t back = 0; back <= pos; ++back) {
      const ChannelDay& d = days[order[pos - back]];
      if (std::chrono::sys_days{today.day} - std::chrono::sys_days{d.day} >
          std::chrono::days{cfg.prev_days})
        break;
      for (const auto& msg : d.messages) roster.add(msg.sender);
    }
    DisentangleResult day_result = disentangle_day(today, roster, common_words, cfg);
    all.tally += day_result.tally;
    for (auto& d : day_result.dialogues) all.dialogues.push_back(std::move(d));
  }
  return all;
}

}  // namespace dyadic
