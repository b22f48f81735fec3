#include "dyadic/log_ingest.hpp"

#include <algorithm>
#include <tuple>

namespace dyadic {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

// Parses "[HH:MM]" at the start of line. Returns minute of day.
int parse_timestamp(std::string_view line) {
  auto bad = [&] { return ParseError("malformed timestamp", std::string(line)); };
  if (line.size() < 7 || line[0] != '[' || line[6] != ']' || line[3] != ':') throw bad();
  if (!is_digit(line[1]) || !is_digit(line[2]) || !is_digit(line[4]) || !is_digit(line[5]))
    throw bad();
  int hh = (line[1] - '0') * 10 + (line[2] - '0');
  int mm = (line[4] - '0') * 10 + (line[5] - '0');
  if (hh > 23 || mm > 59) throw bad();
  return hh * 60 + mm;
}

}  // namespace

ParsedLine parse_line(std::string_view line, Date day, const ParseOptions& opts) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (line.empty() || line.starts_with("===") || line[0] != '[') return SkipLine{};

  const int minute = parse_timestamp(line);
  std::string_view rest = line.substr(7);
  if (!rest.starts_with(' ')) return SkipLine{};
  rest.remove_prefix(1);

  if (rest.starts_with('<')) {
    auto close = rest.find('>');
    if (close == std::string_view::npos) return SkipLine{};
    std::string_view nick = rest.substr(1, close - 1);
    if (nick.empty() || has_whitespace(nick)) return SkipLine{};
    std::string_view body = rest.substr(close + 1);
    if (!body.starts_with(' ')) return SkipLine{};
    body.remove_prefix(1);
    if (trim(body).empty()) return SkipLine{};
    return RawMessage{day, minute, std::string(nick), std::string(body)};
  }

  if (opts.include_actions && rest.starts_with("* ")) {
    std::string_view act = rest.substr(2);
    auto space = act.find(' ');
    if (space == std::string_view::npos || space == 0) return SkipLine{};
    std::string_view nick = act.substr(0, space);
    std::string_view body = act.substr(space + 1);
    if (has_whitespace(nick) || trim(body).empty()) return SkipLine{};
    return RawMessage{day, minute, std::string(nick), std::string(body)};
  }
  return SkipLine{};
}

std::string format_line(const RawMessage& msg) {
  return "[" + format_clock(msg.minute) + "] <" + msg.sender + "> " + msg.body;
}

std::string sanitize_utf8(std::string_view s) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  auto cont = [&](std::size_t k) {
    return k < s.size() && (static_cast<unsigned char>(s[k]) & 0xC0) == 0x80;
  };
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (c < 0x80) {
      len = 1;
    } else if (c >= 0xC2 && c <= 0xDF) {
      len = cont(i + 1) ? 2 : 0;
    } else if (c >= 0xE0 && c <= 0xEF) {
      if (cont(i + 1) && cont(i + 2)) {
        const auto c1 = static_cast<unsigned char>(s[i + 1]);
        bool overlong = c == 0xE0 && c1 < 0xA0;
        bool surrogate = c == 0xED && c1 >= 0xA0;
        len = (overlong || surrogate) ? 0 : 3;
      }
    } else if (c >= 0xF0 && c <= 0xF4) {
      if (cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        const auto c1 = static_cast<unsigned char>(s[i + 1]);
        bool overlong = c == 0xF0 && c1 < 0x90;
        bool too_big = c == 0xF4 && c1 >= 0x90;
        len = (overlong || too_big) ? 0 : 4;
      }
    }
    if (len == 0) {
      out += kReplacement;
      ++i;
    } else {
      out.append(s.substr(i, len));
      i += len;
    }
  }
  return out;
}

ChannelDay read_channel_day(const LogEntry& entry, const ParseOptions& opts) {
  const std::string text = sanitize_utf8(read_file(entry.path));
  ChannelDay out{entry.channel, entry.day, {}, 0, 0};
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++out.lines;
    try {
      ParsedLine parsed = parse_line(line, entry.day, opts);
      if (auto* msg = std::get_if<RawMessage>(&parsed))
        out.messages.push_back(std::move(*msg));
      else
        ++out.skipped;
    } catch (const ParseError& e) {
      if (opts.strict)
        throw ParseError(entry.path.string() + ": " + e.what() + ": " + e.line(), e.line());
      ++out.skipped;
    }
  }
  return out;
}

namespace {

std::optional<Date> date_from_components(const std::string& y, const std::string& m,
                                         const std::string& d) {
  if (y.size() != 4 || m.size() != 2 || d.size() != 2) return std::nullopt;
  return parse_date(y + "-" + m + "-" + d);
}

}  // namespace

ChannelDay read_channel_day(const std::filesystem::path& path, const ParseOptions& opts) {
  LogEntry entry{path.stem().string(), Date{std::chrono::year{1970}, std::chrono::January,
                                            std::chrono::day{1}},
                 path};
  auto dd = path.parent_path();
  auto mm = dd.parent_path();
  auto yy = mm.parent_path();
  if (auto date = date_from_components(yy.filename().string(), mm.filename().string(),
                                       dd.filename().string()))
    entry.day = *date;
  return read_channel_day(entry, opts);
}

std::vector<LogEntry> scan_log_tree(const std::filesystem::path& root,
                                    std::vector<std::string>* warnings) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("log root is not a directory: " + root.string());

  auto warn = [&](const fs::path& p) {
    if (warnings) warnings->push_back("skipping malformed log directory: " + p.string());
  };
  auto sorted_dirs = [](const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_directory()) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
  };
  auto all_digits = [](const std::string& s, std::size_t n) {
    return s.size() == n && std::all_of(s.begin(), s.end(), is_digit);
  };

  std::vector<LogEntry> entries;
  for (const auto& ydir : sorted_dirs(root)) {
    const std::string y = ydir.filename().string();
    if (!all_digits(y, 4)) {
      warn(ydir);
      continue;
    }
    for (const auto& mdir : sorted_dirs(ydir)) {
      const std::string m = mdir.filename().string();
      if (!all_digits(m, 2)) {
        warn(mdir);
        continue;
      }
      for (const auto& ddir : sorted_dirs(mdir)) {
        auto date = date_from_components(y, m, ddir.filename().string());
        if (!date) {
          warn(ddir);
          continue;
        }
        for (const auto& f : fs::directory_iterator(ddir)) {
          if (!f.is_regular_file() || f.path().extension() != ".txt") continue;
          entries.push_back({f.path().stem().string(), *date, f.path()});
        }
      }
    }
  }
  std::sort(entries.begin(), entries.end(), [](const LogEntry& a, const LogEntry& b) {
    return std::tie(a.channel, a.day) < std::tie(b.channel, b.day);
  });
  return entries;
}

}  // namespace dyadic
