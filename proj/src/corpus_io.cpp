#include "dyadic/corpus_io.hpp"

namespace dyadic {

namespace {

constexpr std::string_view kHeader = "dialogue_id\tturn_index\tdate\ttime\tsender\trecipient\ttext";

std::string clean_field(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

int parse_clock(std::string_view s) {
  if (s.size() != 5 || s[2] != ':') throw ValidationError("bad time field: " + std::string(s));
  const long long h = parse_int(s.substr(0, 2)), m = parse_int(s.substr(3, 2));
  if (h < 0 || h > 23 || m < 0 || m > 59)
    throw ValidationError("bad time field: " + std::string(s));
  return static_cast<int>(h * 60 + m);
}

}  // namespace

std::string format_corpus(std::span<const Dialogue> dialogues) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& d : dialogues) {
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      const Turn& t = d.turns[i];
      out += clean_field(d.id);
      out += '\t';
      out += std::to_string(i);
      out += '\t';
      out += format_date(t.day);
      out += '\t';
      out += format_clock(t.minute);
      out += '\t';
      out += clean_field(t.sender);
      out += '\t';
      out += clean_field(t.recipient);
      out += '\t';
      out += clean_field(t.text);
      out += '\n';
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, std::span<const Dialogue> dialogues) {
  write_file_atomic(path, format_corpus(dialogues));
}

std::vector<Dialogue> parse_corpus(std::string_view text) {
  std::vector<Dialogue> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("dialogue_id\t")) continue;

    auto f = split_tabs(line);
    if (f.size() != 7)
      throw ValidationError("corpus line " + std::to_string(line_no) + ": expected 7 fields");
    auto date = parse_date(f[2]);
    if (!date) throw ValidationError("corpus line " + std::to_string(line_no) + ": bad date");
    Turn turn{*date, parse_clock(f[3]), std::string(f[4]), std::string(f[5]), std::string(f[6])};

    if (out.empty() || out.back().id != f[0]) {
      Dialogue d;
      d.id = std::string(f[0]);
      d.day = *date;
      // id format channel/date/ordinal
      if (auto slash = d.id.find('/'); slash != std::string::npos) d.channel = d.id.substr(0, slash);
      out.push_back(std::move(d));
    }
    Dialogue& d = out.back();
    if (static_cast<std::size_t>(parse_int(f[1])) != d.turns.size())
      throw ValidationError("corpus line " + std::to_string(line_no) + ": turn out of order");
    if (d.participants[0].empty()) {
      d.participants[0] = turn.sender;
    } else if (d.participants[1].empty() && to_lower(turn.sender) != to_lower(d.participants[0])) {
      d.participants[1] = turn.sender;
    }
    d.turns.push_back(std::move(turn));
  }
  return out;
}

std::vector<Dialogue> read_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path));
}

}  // namespace dyadic
