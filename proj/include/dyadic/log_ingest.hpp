#pragma once

// Reading IRC day logs in the irclogs layout:
//
//   root/YYYY/MM/DD/#channel.txt      one file per channel per day
//   [HH:MM] <nick> message body       one line per message
//
// System lines ("=== ...") and action lines ("* nick ...") carry no
// addressed utterance and are skipped unless actions are requested.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyadic/common.hpp"

namespace dyadic {

struct RawMessage {
  Date day;
  int minute = 0;  // minute of day, 0..1439
  std::string sender;
  std::string body;

  bool operator==(const RawMessage&) const = default;
};

struct SkipLine {};

using ParsedLine = std::variant<RawMessage, SkipLine>;

struct ParseOptions {
  bool include_actions = false;
  bool strict = false;  // rethrow ParseError instead of counting a skip
};

/// Parses a single log line. Throws ParseError when the line opens with
/// a bracketed timestamp that is not a valid [HH:MM].
ParsedLine parse_line(std::string_view line, Date day, const ParseOptions& opts = {});

std::string format_line(const RawMessage& msg);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

struct ChannelDay {
  std::string channel;
  Date day;
  std::vector<RawMessage> messages;
  std::size_t skipped = 0;
  std::size_t lines = 0;
};

struct LogEntry {
  std::string channel;
  Date day;
  std::filesystem::path path;
};

ChannelDay read_channel_day(const LogEntry& entry, const ParseOptions& opts = {});

// Channel and date are taken from the root/YYYY/MM/DD/#channel.txt layout
// when the path follows it, else channel = file stem and day = 1970-01-01.
ChannelDay read_channel_day(const std::filesystem::path& path, const ParseOptions& opts = {});

/// Enumerates day files under root, sorted by (channel, date). Directories
/// whose names are not valid year/month/day components are skipped and
/// reported through `warnings` when given.
std::vector<LogEntry> scan_log_tree(const std::filesystem::path& root,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace dyadic
