#pragma once

// Dyadic dialogue extraction from a multi-party channel.
//
// Per channel day the pipeline is fixed:
//   identify_recipient -> extract_dialogues -> fill_holes
//     -> merge_consecutive -> filter_dialogue

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/common.hpp"
#include "dyadic/log_ingest.hpp"

namespace dyadic {

/// Nicknames seen as senders, keyed case-insensitively. The first spelling
/// observed is kept as the canonical form.
class UsernameRoster {
 public:
  UsernameRoster() = default;
  explicit UsernameRoster(int window_days) : window_days_(window_days) {}

  void add(std::string_view nick);
  bool contains(std::string_view nick) const;
  std::optional<std::string> canonical(std::string_view nick) const;
  std::size_t size() const { return names_.size(); }
  int window_days() const { return window_days_; }

 private:
  std::map<std::string, std::string> names_;  // lowercase -> canonical
  int window_days_ = 0;
};

/// Builds the roster for the most recent day in `history`, covering that
/// day and the `window_days` preceding calendar days.
UsernameRoster build_roster(std::span<const ChannelDay> history, int window_days);

// Lowercase word list, one word per line.
class WordSet {
 public:
  WordSet() = default;
  explicit WordSet(std::set<std::string> words) : words_(std::move(words)) {}
  static WordSet load(const std::filesystem::path& path);
  // Small built-in list of very common English words.
  static WordSet default_common_words();

  bool contains(std::string_view lowercase_word) const {
    return words_.find(std::string(lowercase_word)) != words_.end();
  }
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

struct AddressedMessage {
  Date day;
  int minute = 0;
  std::string sender;
  std::optional<std::string> recipient;  // canonical roster spelling
  std::string utterance;

  bool operator==(const AddressedMessage&) const = default;
};

struct RecipientOptions {
  // Also accept a name mention as the last token of the body.
  bool match_last_token = false;
};

AddressedMessage identify_recipient(const RawMessage& msg, const UsernameRoster& roster,
                                    const WordSet& common_words,
                                    const RecipientOptions& opts = {});

// Indices into one day's AddressedMessage stream.
struct DialogueCandidate {
  // participants[0] is the addressee of the first response (the asker),
  // participants[1] the responder.
  std::array<std::string, 2> participants;
  std::vector<std::size_t> members;  // ascending stream positions
};

std::vector<DialogueCandidate> extract_dialogues(std::span<const AddressedMessage> day,
                                                 int window_mins = 3);

DialogueCandidate fill_holes(const DialogueCandidate& candidate,
                             std::span<const AddressedMessage> day);

struct Turn {
  Date day;
  int minute = 0;
  std::string sender;
  std::string recipient;  // empty when the turn opened unaddressed
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct MergedCandidate {
  std::array<std::string, 2> participants;
  std::vector<Turn> turns;
  // Pre-merge utterance counts, aligned with participants.
  std::array<std::size_t, 2> utterances{0, 0};

  std::size_t utterance_count() const { return utterances[0] + utterances[1]; }
};

MergedCandidate merge_consecutive(const DialogueCandidate& candidate,
                                  std::span<const AddressedMessage> day);

struct FilterConfig {
  std::size_t min_turns = 3;
  std::size_t dominance_len = 5;
  double dominance_frac = 0.8;
};

enum class FilterVerdict { accepted, too_few_turns, dominated };

FilterVerdict filter_dialogue(const MergedCandidate& candidate, const FilterConfig& cfg = {});

struct Dialogue {
  std::string id;
  std::array<std::string, 2> participants;
  std::vector<Turn> turns;
  std::string channel;
  Date day;

  bool operator==(const Dialogue&) const = default;
};

struct DisentangleConfig {
  int window_mins = 3;
  int prev_days = 1;
  FilterConfig filter;
  RecipientOptions recipient;
};

struct DisentangleTally {
  std::size_t days = 0;
  std::size_t messages = 0;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  std::size_t rejected_min_turns = 0;
  std::size_t rejected_dominance = 0;

  DisentangleTally& operator+=(const DisentangleTally& o);
};

struct DisentangleResult {
  std::vector<Dialogue> dialogues;
  DisentangleTally tally;
};

/// Runs the full pipeline on one channel day. `roster` must cover the day.
DisentangleResult disentangle_day(const ChannelDay& day, const UsernameRoster& roster,
                                  const WordSet& common_words,
                                  const DisentangleConfig& cfg = {});

/// Processes every day of one channel in date order, building each day's
/// roster from the preceding `cfg.prev_days` days.
DisentangleResult disentangle_channel(std::span<const ChannelDay> days,
                                      const WordSet& common_words,
                                      const DisentangleConfig& cfg = {});

}  // namespace dyadic
