#include <gtest/gtest.h>

#include <set>

#include "dyadic/disentangle.hpp"
#include "test_support.hpp"

using namespace dyadic;

namespace {

Date day_n(int d) { return Date{std::chrono::year{2011}, std::chrono::month{2}, std::chrono::day{static_cast<unsigned>(d)}}; }

RawMessage raw(int minute, std::string sender, std::string body, int d = 10) {
  return RawMessage{day_n(d), minute, std::move(sender), std::move(body)};
}

ChannelDay channel_day(std::vector<RawMessage> msgs, int d = 10) {
  ChannelDay cd;
  cd.channel = "#test";
  cd.day = day_n(d);
  cd.messages = std::move(msgs);
  cd.lines = cd.messages.size();
  return cd;
}

ChannelDay fixture_day(const char* which) {
  auto entries = scan_log_tree(support::fixture_dir() / which);
  return read_channel_day(entries.at(0));
}

std::vector<AddressedMessage> address_all(const ChannelDay& cd) {
  std::vector<ChannelDay> hist{cd};
  const UsernameRoster roster = build_roster(hist, 1);
  const WordSet common = WordSet::default_common_words();
  std::vector<AddressedMessage> out;
  for (const auto& m : cd.messages) out.push_back(identify_recipient(m, roster, common));
  return out;
}

std::vector<std::string> utterances_of(const DialogueCandidate& c,
                                       const std::vector<AddressedMessage>& day) {
  std::vector<std::string> out;
  for (auto i : c.members) out.push_back(day[i].utterance);
  return out;
}

}  // namespace

TEST(Roster, UnionOverWindow) {
  std::vector<ChannelDay> hist{channel_day({raw(1, "kuja", "x"), raw(2, "Taru", "y")}, 9),
                               channel_day({raw(1, "Old", "z"), raw(2, "kuja", "w")}, 10)};
  const UsernameRoster r = build_roster(hist, 1);
  EXPECT_EQ(r.size(), 3u);
  EXPECT_TRUE(r.contains("taru"));
  EXPECT_TRUE(r.contains("TARU"));
  EXPECT_EQ(r.canonical("TARU"), "Taru");
}

TEST(Roster, WindowZeroExcludesPreviousDay) {
  std::vector<ChannelDay> hist{channel_day({raw(1, "Taru", "y")}, 9),
                               channel_day({raw(1, "Old", "z")}, 10)};
  EXPECT_TRUE(build_roster(hist, 1).contains("Taru"));
  EXPECT_FALSE(build_roster(hist, 0).contains("Taru"));
}

TEST(Roster, EmptyHistory) { EXPECT_EQ(build_roster({}, 1).size(), 0u); }

TEST(IdentifyRecipient, NameMentionStripped) {
  UsernameRoster roster;
  roster.add("Taru");
  roster.add("kuja");
  const auto m = identify_recipient(raw(225, "kuja", "Taru: Haha sucker."), roster,
                                    WordSet::default_common_words());
  EXPECT_EQ(m.recipient, "Taru");
  EXPECT_EQ(m.utterance, "Haha sucker.");
}

TEST(IdentifyRecipient, CaseInsensitiveAndCanonical) {
  UsernameRoster roster;
  roster.add("kuja");
  const auto m = identify_recipient(raw(225, "Taru", "Kuja: ?"), roster,
                                    WordSet::default_common_words());
  EXPECT_EQ(m.recipient, "kuja");
  EXPECT_EQ(m.utterance, "?");
}

TEST(IdentifyRecipient, NoMention) {
  UsernameRoster roster;
  roster.add("dell");
  const auto m = identify_recipient(raw(0, "dell", "well, can I move the drives?"), roster,
                                    WordSet::default_common_words());
  EXPECT_FALSE(m.recipient);
  EXPECT_EQ(m.utterance, "well, can I move the drives?");
}

TEST(IdentifyRecipient, CommonWordNickIgnored) {
  UsernameRoster roster;
  roster.add("stop");
  roster.add("well");
  const WordSet common = WordSet::default_common_words();
  EXPECT_FALSE(identify_recipient(raw(0, "a", "stop the service"), roster, common).recipient);
  EXPECT_FALSE(identify_recipient(raw(0, "a", "well, ok"), roster, common).recipient);
}

TEST(IdentifyRecipient, DefaultListKeepsFixtureNicks) {
  const WordSet common = WordSet::default_common_words();
  for (auto nick : {"old", "rc", "dell", "cucho", "kuja", "taru"}) EXPECT_FALSE(common.contains(nick));
}

TEST(IdentifyRecipient, SelfMentionIgnored) {
  UsernameRoster roster;
  roster.add("ann");
  EXPECT_FALSE(identify_recipient(raw(0, "ann", "ann: test"), roster, WordSet()).recipient);
}

TEST(IdentifyRecipient, PunctuationVariants) {
  UsernameRoster roster;
  roster.add("cucho");
  for (auto body : {"cucho, hi", "cucho: hi", "cucho. hi", "cucho hi", "CUCHO:: hi"}) {
    const auto m = identify_recipient(raw(0, "dell", body), roster, WordSet());
    EXPECT_EQ(m.recipient, "cucho") << body;
    EXPECT_EQ(m.utterance, "hi") << body;
  }
}

TEST(IdentifyRecipient, LastTokenOptional) {
  UsernameRoster roster;
  roster.add("bob");
  RecipientOptions opts;
  EXPECT_FALSE(identify_recipient(raw(0, "ann", "thanks a lot bob"), roster, WordSet()).recipient);
  opts.match_last_token = true;
  const auto m = identify_recipient(raw(0, "ann", "thanks a lot bob!"), roster, WordSet(), opts);
  EXPECT_EQ(m.recipient, "bob");
  EXPECT_EQ(m.utterance, "thanks a lot");
}

TEST(WordSet, LoadsLowercased) {
  support::TempDir tmp;
  support::write_text(tmp / "w.txt", "Alpha\nbeta\n\n gamma \n");
  const WordSet w = WordSet::load(tmp / "w.txt");
  EXPECT_EQ(w.size(), 3u);
  EXPECT_TRUE(w.contains("alpha"));
  EXPECT_TRUE(w.contains("gamma"));
}

TEST(ExtractDialogues, SharedQuestionCandidates) {
  const auto day = address_all(fixture_day("logs_shared_question"));
  const auto cands = extract_dialogues(day);
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_EQ(cands[0].participants[0], "Old");
  EXPECT_EQ(cands[0].participants[1], "bur[n]er");
  EXPECT_EQ(cands[0].members, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(cands[1].members.size(), 6u);
  std::set<std::string> senders;
  for (auto i : cands[1].members) senders.insert(day[i].sender);
  EXPECT_EQ(senders, (std::set<std::string>{"Taru", "kuja"}));
  // _pm and LiveCD belong to no candidate.
  for (const auto& c : cands)
    for (auto i : c.members) EXPECT_TRUE(day[i].sender != "_pm" && day[i].sender != "LiveCD");
}

TEST(ExtractDialogues, WindowRule) {
  auto make = [](int q_minute) {
    return address_all(channel_day({raw(q_minute, "ann", "how do i boot?"), raw(225, "bob", "ann: grub")}));
  };
  auto far = extract_dialogues(make(220), 3);
  ASSERT_EQ(far.size(), 1u);
  EXPECT_EQ(far[0].members, (std::vector<std::size_t>{1}));  // no initial question
  auto near = extract_dialogues(make(222), 3);
  ASSERT_EQ(near.size(), 1u);
  EXPECT_EQ(near[0].members, (std::vector<std::size_t>{0, 1}));
}

TEST(ExtractDialogues, SharedInitialQuestion) {
  const auto day = address_all(channel_day({raw(10, "ann", "my wifi is dead?"),
                                            raw(11, "bob", "ann: which card"),
                                            raw(11, "cat", "ann: try a reboot"),
                                            raw(12, "ann", "bob: intel"),
                                            raw(12, "ann", "cat: did not help")}));
  const auto cands = extract_dialogues(day);
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_EQ(cands[0].members, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(cands[1].members, (std::vector<std::size_t>{0, 2, 4}));
}

TEST(FillHoles, HoleFill) {
  const auto day = address_all(fixture_day("logs_hole_fill"));
  const auto cands = extract_dialogues(day);
  ASSERT_EQ(cands.size(), 2u);
  for (const auto& c : cands) {
    const auto filled = fill_holes(c, day);
    const auto texts = utterances_of(filled, day);
    EXPECT_EQ(std::count(texts.begin(), texts.end(), "ok"), 0);
    EXPECT_EQ(std::count(texts.begin(), texts.end(), "lol"), 0);
    const bool rc = c.participants[1] == "RC";
    EXPECT_EQ(std::count(texts.begin(), texts.end(), "this is the problem with RAID:)"), rc ? 1 : 0);
  }
}

TEST(FillHoles, NothingToAdd) {
  const auto day = address_all(channel_day({raw(1, "ann", "q?"), raw(2, "bob", "ann: a"),
                                            raw(3, "ann", "bob: b")}));
  const auto c = extract_dialogues(day).at(0);
  EXPECT_EQ(fill_holes(c, day).members, c.members);
}

TEST(FillHoles, BothBusyWithThirdParties) {
  const auto day = address_all(channel_day({raw(1, "ann", "q?"), raw(2, "cat", "hello"),
                                            raw(2, "bob", "ann: a"), raw(3, "ann", "cat: hi"),
                                            raw(3, "bob", "cat: yo"), raw(4, "ann", "loose line"),
                                            raw(4, "bob", "another loose line"),
                                            raw(5, "ann", "bob: b")}));
  const auto cands = extract_dialogues(day);
  const auto& c = cands.at(0);
  ASSERT_EQ(c.participants[0], "ann");
  EXPECT_EQ(fill_holes(c, day).members, c.members);
}

TEST(FillHoles, FreeParticipantGetsUnaddressedLines) {
  const auto day = address_all(channel_day({raw(1, "ann", "q?"), raw(2, "bob", "ann: a"),
                                            raw(3, "bob", "also this"), raw(4, "ann", "bob: b")}));
  const auto c = extract_dialogues(day).at(0);
  EXPECT_EQ(fill_holes(c, day).members, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(MergeConsecutive, HoleFillRcTurn) {
  const auto day = address_all(fixture_day("logs_hole_fill"));
  for (const auto& c : extract_dialogues(day)) {
    if (c.participants[1] != "RC") continue;
    const auto merged = merge_consecutive(fill_holes(c, day), day);
    ASSERT_EQ(merged.turns.size(), 3u);
    EXPECT_EQ(merged.turns[1].sender, "RC");
    EXPECT_EQ(merged.turns[1].recipient, "dell");
    EXPECT_EQ(merged.turns[1].text,
              "you can't move the drives definitely not this is the problem with RAID:)");
    EXPECT_EQ(merged.utterances[0], 2u);  // dell
    EXPECT_EQ(merged.utterances[1], 3u);  // RC
  }
}

TEST(MergeConsecutive, AlternatingUnchanged) {
  const auto day = address_all(channel_day({raw(1, "ann", "q?"), raw(2, "bob", "ann: a"),
                                            raw(3, "ann", "bob: b")}));
  const auto merged = merge_consecutive(extract_dialogues(day).at(0), day);
  ASSERT_EQ(merged.turns.size(), 3u);
  EXPECT_EQ(merged.turns[0].text, "q?");
  EXPECT_EQ(merged.turns[0].recipient, "");
  EXPECT_EQ(merged.turns[2].text, "b");
  EXPECT_EQ(merged.utterance_count(), 3u);
}

namespace {

MergedCandidate synthetic_merged(std::size_t turns, std::size_t u0, std::size_t u1) {
  MergedCandidate m;
  m.participants = {"a", "b"};
  for (std::size_t t = 0; t < turns; ++t) m.turns.push_back({day_n(1), 0, t % 2 ? "b" : "a", "", "x"});
  m.utterances = {u0, u1};
  return m;
}

}  // namespace

TEST(FilterDialogue, Thresholds) {
  EXPECT_EQ(filter_dialogue(synthetic_merged(2, 1, 1)), FilterVerdict::too_few_turns);
  EXPECT_EQ(filter_dialogue(synthetic_merged(3, 9, 1)), FilterVerdict::dominated);
  EXPECT_EQ(filter_dialogue(synthetic_merged(3, 3, 1)), FilterVerdict::accepted);
  EXPECT_EQ(filter_dialogue(synthetic_merged(3, 4, 1)), FilterVerdict::accepted);  // length 5
  EXPECT_EQ(filter_dialogue(synthetic_merged(3, 5, 1)), FilterVerdict::dominated);  // 5/6
  EXPECT_EQ(filter_dialogue(synthetic_merged(4, 8, 2)), FilterVerdict::accepted);  // exactly 0.8
}

TEST(FilterDialogue, NeverAcceptsBelowTwoTurns) {
  FilterConfig loose;
  loose.min_turns = 0;
  EXPECT_EQ(filter_dialogue(synthetic_merged(1, 1, 0), loose), FilterVerdict::too_few_turns);
}

TEST(Disentangle, SharedQuestionDefaultKeepsOneDialogue) {
  const ChannelDay cd = fixture_day("logs_shared_question");
  std::vector<ChannelDay> days{cd};
  const auto result = disentangle_channel(days, WordSet::default_common_words());
  ASSERT_EQ(result.dialogues.size(), 1u);
  EXPECT_EQ(result.tally.candidates, 2u);
  EXPECT_EQ(result.tally.rejected_min_turns, 1u);
  const Dialogue& d = result.dialogues[0];
  EXPECT_EQ(d.id, "#ubuntu/2007-04-11/0000");
  EXPECT_EQ(d.turns.size(), 6u);
  EXPECT_EQ(d.turns.front().text, "Haha sucker.");
  EXPECT_EQ(d.turns.back().text, "I did.");
}

TEST(Disentangle, RosterSpansPreviousDay) {
  // bob speaks only on the previous day; today ann addresses him.
  std::vector<ChannelDay> days{
      channel_day({raw(1, "bob", "hi all")}, 9),
      channel_day({raw(1, "bob", "anyone here?"), raw(2, "ann", "bob: yes"),
                   raw(3, "bob", "ann: great"), raw(4, "ann", "bob: indeed")}, 10)};
  DisentangleConfig cfg;
  EXPECT_EQ(disentangle_channel(days, WordSet(), cfg).dialogues.size(), 1u);
}

TEST(Disentangle, GeneratedTreesSatisfyInvariants) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    support::TempDir tmp;
    support::write_chat_tree(tmp.path(), seed, 2, 12);
    std::vector<ChannelDay> days;
    for (const auto& e : scan_log_tree(tmp.path())) days.push_back(read_channel_day(e));
    const auto a = disentangle_channel(days, WordSet::default_common_words());
    const auto b = disentangle_channel(days, WordSet::default_common_words());
    EXPECT_EQ(a.dialogues, b.dialogues);
    EXPECT_EQ(a.dialogues.size(), 24u);
    std::set<std::string> ids;
    for (const auto& d : a.dialogues) {
      EXPECT_TRUE(ids.insert(d.id).second);
      EXPECT_GE(d.turns.size(), 3u);
      std::set<std::string> senders;
      for (std::size_t t = 0; t < d.turns.size(); ++t) {
        senders.insert(d.turns[t].sender);
        EXPECT_NE(d.turns[t].sender, d.turns[t].recipient);
        if (t > 0) {
          EXPECT_NE(d.turns[t].sender, d.turns[t - 1].sender);
          EXPECT_LE(absolute_minute(d.turns[t - 1].day, d.turns[t - 1].minute),
                    absolute_minute(d.turns[t].day, d.turns[t].minute));
        }
      }
      EXPECT_EQ(senders.size(), 2u);
    }
  }
}
