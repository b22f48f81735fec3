#include <gtest/gtest.h>

#include "dyadic/log_ingest.hpp"
#include "test_support.hpp"

using namespace dyadic;
namespace fs = std::filesystem;

namespace {

const Date kDay{std::chrono::year{2007}, std::chrono::month{4}, std::chrono::day{11}};

RawMessage expect_message(const ParsedLine& p) {
  EXPECT_TRUE(std::holds_alternative<RawMessage>(p));
  return std::holds_alternative<RawMessage>(p) ? std::get<RawMessage>(p) : RawMessage{};
}

bool is_skip(const ParsedLine& p) { return std::holds_alternative<SkipLine>(p); }

}  // namespace

TEST(ParseLine, AddressedMessage) {
  auto m = expect_message(parse_line("[03:45] <kuja> Taru: Haha sucker.", kDay));
  EXPECT_EQ(m.minute, 3 * 60 + 45);
  EXPECT_EQ(m.sender, "kuja");
  EXPECT_EQ(m.body, "Taru: Haha sucker.");
  EXPECT_EQ(m.day, kDay);
}

TEST(ParseLine, UnaddressedMessage) {
  auto m = expect_message(parse_line("[12:21] <dell> well, can I move the drives?", kDay));
  EXPECT_EQ(m.minute, 12 * 60 + 21);
  EXPECT_EQ(m.sender, "dell");
  EXPECT_EQ(m.body, "well, can I move the drives?");
}

TEST(ParseLine, SystemAndActionLinesAreSkipped) {
  EXPECT_TRUE(is_skip(parse_line("=== foo has joined #ubuntu", kDay)));
  EXPECT_TRUE(is_skip(parse_line("[10:00] * foo waves", kDay)));
  EXPECT_TRUE(is_skip(parse_line("", kDay)));
  EXPECT_TRUE(is_skip(parse_line("plain text", kDay)));
}

TEST(ParseLine, ActionsIncludedOnRequest) {
  ParseOptions opts;
  opts.include_actions = true;
  auto m = expect_message(parse_line("[10:00] * foo waves at bar", kDay, opts));
  EXPECT_EQ(m.sender, "foo");
  EXPECT_EQ(m.body, "waves at bar");
}

TEST(ParseLine, MalformedTimestampThrowsWithLine) {
  for (std::string bad : {"[3:45] <a> hi", "[24:00] <a> hi", "[12:60] <a> hi", "[ab:cd] <a> hi"}) {
    try {
      parse_line(bad, kDay);
      ADD_FAILURE() << "no error for " << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), bad);
    }
  }
}

TEST(ParseLine, MalformedNickSkipped) {
  EXPECT_TRUE(is_skip(parse_line("[10:00] <> hello", kDay)));
  EXPECT_TRUE(is_skip(parse_line("[10:00] <a b> hello", kDay)));
  EXPECT_TRUE(is_skip(parse_line("[10:00] <ab hello", kDay)));
  EXPECT_TRUE(is_skip(parse_line("[10:00] <ab>", kDay)));
}

TEST(ParseLine, StripsCarriageReturn) {
  auto m = expect_message(parse_line("[00:00] <a> hi\r", kDay));
  EXPECT_EQ(m.body, "hi");
}

TEST(ParseLine, RoundTripProperty) {
  Rng rng(3);
  const std::string nick_chars = "abcXYZ019_[]|^-`{}";
  const std::string body_chars = "abc xyz:,.?!<>[]*=\"'/";
  for (int i = 0; i < 2000; ++i) {
    RawMessage m;
    m.day = kDay;
    m.minute = static_cast<int>(rng.uniform_index(1440));
    const std::size_t nl = 1 + rng.uniform_index(10);
    for (std::size_t k = 0; k < nl; ++k) m.sender += nick_chars[rng.uniform_index(nick_chars.size())];
    m.sender.erase(std::remove(m.sender.begin(), m.sender.end(), '>'), m.sender.end());
    m.body = "x";
    const std::size_t bl = rng.uniform_index(30);
    for (std::size_t k = 0; k < bl; ++k) m.body += body_chars[rng.uniform_index(body_chars.size())];
    EXPECT_EQ(expect_message(parse_line(format_line(m), kDay)), m);
  }
}

TEST(ParseLine, NeverCrashesOnArbitraryBytes) {
  Rng rng(17);
  const std::string alphabet = "[]<>:0123456789 *=abc\t\r\x01\xff";
  for (int i = 0; i < 20000; ++i) {
    std::string line;
    const std::size_t n = rng.uniform_index(24);
    for (std::size_t k = 0; k < n; ++k) {
      line += rng.uniform_index(4) == 0 ? static_cast<char>(rng.uniform_index(256))
                                        : alphabet[rng.uniform_index(alphabet.size())];
    }
    if (rng.uniform_index(2)) line = "[" + std::to_string(rng.uniform_index(30)) + line;
    try {
      parse_line(line, kDay);
    } catch (const ParseError&) {
      // Recoverable by contract.
    }
  }
}

TEST(SanitizeUtf8, ReplacesInvalidSequences) {
  EXPECT_EQ(sanitize_utf8("abc"), "abc");
  EXPECT_EQ(sanitize_utf8("caf\xC3\xA9"), "caf\xC3\xA9");
  EXPECT_EQ(sanitize_utf8("a\xFF" "b"), "a\xEF\xBF\xBD" "b");
  EXPECT_EQ(sanitize_utf8("\xC3"), "\xEF\xBF\xBD");
  EXPECT_EQ(sanitize_utf8("\xED\xA0\x80"), "\xEF\xBF\xBD\xEF\xBF\xBD\xEF\xBF\xBD");
}

TEST(ReadChannelDay, SharedQuestionFixtureHasTenMessages) {
  const auto entries = scan_log_tree(support::fixture_dir() / "logs_shared_question");
  ASSERT_EQ(entries.size(), 1u);
  const ChannelDay day = read_channel_day(entries[0]);
  EXPECT_EQ(day.messages.size(), 10u);
  EXPECT_EQ(day.channel, "#ubuntu");
  EXPECT_EQ(format_date(day.day), "2007-04-11");
  EXPECT_EQ(day.messages[3].sender, "bur[n]er");
  EXPECT_EQ(day.messages.size() + day.skipped, day.lines);
}

TEST(ReadChannelDay, CountsAndSkips) {
  support::TempDir tmp;
  support::write_text(tmp / "empty.txt", "");
  EXPECT_TRUE(read_channel_day(tmp / "empty.txt").messages.empty());

  support::write_text(tmp / "mixed.txt",
                      "=== a joined\n[01:00] <a> one\n[01:01] <b> a: two\n=== b left\n"
                      "[01:02] <a> three\n");
  const ChannelDay d = read_channel_day(tmp / "mixed.txt");
  EXPECT_EQ(d.messages.size(), 3u);
  EXPECT_EQ(d.skipped, 2u);
  EXPECT_EQ(d.lines, 5u);
}

TEST(ReadChannelDay, StrictModeAbortsOnBadTimestamp) {
  support::TempDir tmp;
  support::write_text(tmp / "bad.txt", "[01:00] <a> fine\n[1:00] <a> broken\n");
  const ChannelDay lenient = read_channel_day(tmp / "bad.txt");
  EXPECT_EQ(lenient.messages.size(), 1u);
  EXPECT_EQ(lenient.skipped, 1u);
  ParseOptions strict;
  strict.strict = true;
  EXPECT_THROW(read_channel_day(tmp / "bad.txt", strict), ParseError);
}

TEST(ReadChannelDay, InvalidUtf8IsReplaced) {
  support::TempDir tmp;
  support::write_text(tmp / "u.txt", "[01:00] <a> bad \xFF byte\n");
  const ChannelDay d = read_channel_day(tmp / "u.txt");
  ASSERT_EQ(d.messages.size(), 1u);
  EXPECT_EQ(d.messages[0].body, "bad \xEF\xBF\xBD byte");
}

TEST(ReadChannelDay, MissingFileIsIoError) {
  EXPECT_THROW(read_channel_day(fs::path("/nonexistent/dyadic/x.txt")), IoError);
}

TEST(ScanLogTree, SortedByChannelThenDate) {
  support::TempDir tmp;
  for (auto rel : {"2010/01/02/#b.txt", "2010/01/01/#b.txt", "2010/01/02/#a.txt",
                   "2010/01/01/#a.txt"})
    support::write_text(tmp / rel, "[00:00] <x> y\n");
  const auto entries = scan_log_tree(tmp.path());
  ASSERT_EQ(entries.size(), 4u);
  EXPECT_EQ(entries[0].channel, "#a");
  EXPECT_EQ(format_date(entries[0].day), "2010-01-01");
  EXPECT_EQ(entries[1].channel, "#a");
  EXPECT_EQ(format_date(entries[1].day), "2010-01-02");
  EXPECT_EQ(entries[2].channel, "#b");
  EXPECT_EQ(format_date(entries[3].day), "2010-01-02");
}

TEST(ScanLogTree, EmptyRootAndMalformedDirectories) {
  support::TempDir tmp;
  EXPECT_TRUE(scan_log_tree(tmp.path()).empty());
  support::write_text(tmp / "2010/01/01/#a.txt", "");
  support::write_text(tmp / "2010/13/01/#a.txt", "");
  support::write_text(tmp / "20x0/01/01/#a.txt", "");
  std::vector<std::string> warnings;
  const auto entries = scan_log_tree(tmp.path(), &warnings);
  EXPECT_EQ(entries.size(), 1u);
  EXPECT_GE(warnings.size(), 2u);
}

TEST(ScanLogTree, MissingRootIsIoError) {
  EXPECT_THROW(scan_log_tree("/nonexistent/dyadic-root"), IoError);
}
