#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dyadic/corpus_io.hpp"
#include "dyadic/eval.hpp"
#include "dyadic/models.hpp"
#include "dyadic/preprocess.hpp"
#include "dyadic/synthetic.hpp"
#include "test_support.hpp"

using namespace dyadic;

namespace {

std::vector<TestRecord> numbered_records(std::size_t n, std::size_t negatives) {
  std::vector<TestRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    TestRecord r{"ctx" + std::to_string(i), "true" + std::to_string(i), {}};
    for (std::size_t k = 0; k < negatives; ++k)
      r.distractors.push_back("false" + std::to_string(i) + "_" + std::to_string(k));
    out.push_back(r);
  }
  return out;
}

// Scores candidates by a fixed preference: names starting with `prefer` first.
Ranker prefix_ranker(std::string prefer, bool best) {
  return [prefer, best](std::string_view, std::span<const std::string> cands) {
    std::vector<ScoredCandidate> out;
    for (std::size_t i = 0; i < cands.size(); ++i)
      out.push_back({i, (cands[i].starts_with(prefer) == best) ? 1.0 : 0.0});
    sort_ranking(out);
    return out;
  };
}

Dialogue toy(std::string id, std::size_t turns, int start, int step) {
  const Date day{std::chrono::year{2013}, std::chrono::month{1}, std::chrono::day{2}};
  Dialogue d;
  d.id = std::move(id);
  d.participants = {"a", "b"};
  d.day = day;
  for (std::size_t t = 0; t < turns; ++t)
    d.turns.push_back({day, start + static_cast<int>(t) * step, t % 2 ? "b" : "a", "",
                       "one two, three"});
  return d;
}

}  // namespace

TEST(Recall, HandCount) {
  const std::vector<std::size_t> ranks{1, 3, 2, 7, 1};
  EXPECT_DOUBLE_EQ(recall_at_k(ranks, 2), 0.6);
  EXPECT_DOUBLE_EQ(recall_at_k(ranks, 1), 0.4);
  EXPECT_DOUBLE_EQ(recall_at_k(ranks, 10), 1.0);
  const std::vector<std::size_t> ones(4, 1);
  EXPECT_DOUBLE_EQ(recall_at_k(ones, 1), 1.0);
}

TEST(Recall, PermutationInvariant) {
  std::vector<std::size_t> ranks{1, 4, 2, 2, 9, 1, 3};
  const double r = recall_at_k(ranks, 2);
  std::reverse(ranks.begin(), ranks.end());
  EXPECT_DOUBLE_EQ(recall_at_k(ranks, 2), r);
}

TEST(Evaluate, OracleAndAdversary) {
  const auto records = numbered_records(30, 9);
  const RecallReport oracle = evaluate_ranker(prefix_ranker("true", true), records);
  EXPECT_EQ(oracle.setting, "1-in-10");
  for (const auto& [k, v] : oracle.recall) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(oracle.recall.size(), 3u);
  const RecallReport adversary = evaluate_ranker(prefix_ranker("true", false), records);
  EXPECT_EQ(adversary.at(1), 0.0);
  EXPECT_EQ(adversary.at(2), 0.0);
  EXPECT_EQ(adversary.at(5), 0.0);
}

TEST(Evaluate, OneInTwoFromTenFile) {
  const auto records = numbered_records(10, 9);
  EvalOptions opts;
  opts.negatives = 1;
  const RecallReport r = evaluate_ranker(prefix_ranker("true", true), records, opts);
  EXPECT_EQ(r.setting, "1-in-2");
  EXPECT_EQ(r.candidates, 2u);
  EXPECT_EQ(r.recall.size(), 1u);  // only R@1 is meaningful
  opts.negatives = 12;
  EXPECT_THROW(evaluate_ranker(prefix_ranker("true", true), records, opts), ValidationError);
}

TEST(Evaluate, ConstantRankerIsNotRewardedByCandidateOrder) {
  // A ranker that always returns index order would score 1.0 if the true
  // response were always first; the per-record shuffle prevents that.
  const auto records = numbered_records(400, 1);
  Ranker lazy = [](std::string_view, std::span<const std::string> cands) {
    std::vector<ScoredCandidate> out;
    for (std::size_t i = 0; i < cands.size(); ++i) out.push_back({i, 0.0});
    return out;
  };
  const double r1 = evaluate_ranker(lazy, records).at(1);
  EXPECT_GT(r1, 0.4);
  EXPECT_LT(r1, 0.6);
}

TEST(Evaluate, MonotoneInK) {
  KeywordTaskConfig kc;
  kc.train_positives = 200;
  kc.test_records = 100;
  const KeywordTask task = make_keyword_task(kc);
  const Model tfidf = train_tfidf(task.train);
  Ranker ranker = [&](std::string_view c, std::span<const std::string> cands) {
    return rank_with(tfidf, c, cands);
  };
  const RecallReport r = evaluate_ranker(ranker, task.test);
  EXPECT_LE(r.at(1), r.at(2));
  EXPECT_LE(r.at(2), r.at(5));
  EvalOptions two;
  two.negatives = 1;
  EXPECT_EQ(evaluate_ranker(ranker, task.test, two).at(1), 1.0);
}

TEST(Report, Formats) {
  RecallReport r;
  r.setting = "1-in-10";
  r.n_records = 4;
  r.candidates = 10;
  r.recall = {{1, 0.5}, {2, 0.75}, {5, 1.0}};
  EXPECT_EQ(format_report_csv(r),
            "setting,k,recall,n_records\n1-in-10,1,0.5,4\n1-in-10,2,0.75,4\n1-in-10,5,1,4\n");
  EXPECT_NE(format_report_text(r).find("R@2 = 0.7500"), std::string::npos);
}

TEST(CorpusStats, ToyCorpus) {
  const std::vector<Dialogue> ds{toy("x", 3, 10, 1), toy("y", 5, 20, 3)};
  const CorpusStats s = corpus_stats(ds);
  EXPECT_EQ(s.dialogues, 2u);
  EXPECT_EQ(s.utterances, 8u);
  EXPECT_EQ(s.min_turns, 3u);
  EXPECT_DOUBLE_EQ(s.avg_turns, 4.0);
  EXPECT_EQ(s.turn_histogram, (std::map<std::size_t, std::size_t>{{3, 1}, {5, 1}}));
  EXPECT_EQ(s.words, 8u * 4);  // one two , three
  EXPECT_DOUBLE_EQ(s.avg_words_per_utterance, 4.0);
  EXPECT_DOUBLE_EQ(s.median_duration_minutes, (2.0 + 12.0) / 2);
  ASSERT_TRUE(s.loglog_slope);
  EXPECT_NEAR(*s.loglog_slope, 0.0, 1e-12);
  EXPECT_EQ(format_histogram_csv(s), "turns,count\n3,1\n5,1\n");
}

TEST(CorpusStats, SingleDialogueMedianIsItsDuration) {
  const std::vector<Dialogue> ds{toy("x", 4, 100, 5)};
  const CorpusStats s = corpus_stats(ds);
  EXPECT_DOUBLE_EQ(s.median_duration_minutes, 15.0);
  EXPECT_FALSE(s.loglog_slope);
}

TEST(CorpusStats, Empty) { EXPECT_EQ(corpus_stats({}).dialogues, 0u); }

TEST(LearningCurve, NestedPrefixes) {
  std::vector<Triple> train;
  for (int i = 0; i < 40; ++i) train.push_back({"c" + std::to_string(i), "r", i % 2});
  std::vector<std::vector<Triple>> seen;
  CurveTrainer trainer = [&](std::span<const Triple> subset, std::span<const TestRecord>) {
    seen.emplace_back(subset.begin(), subset.end());
    return static_cast<double>(subset.size()) / 40.0;
  };
  const std::vector<double> fractions{0.25, 0.5, 1.0};
  const auto points = learning_curve(train, {}, fractions, trainer, 3);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[0].train_size, 10u);
  EXPECT_EQ(points[1].train_size, 20u);
  EXPECT_EQ(points[2].train_size, 40u);
  EXPECT_TRUE(std::equal(seen[0].begin(), seen[0].end(), seen[1].begin()));
  EXPECT_TRUE(std::equal(seen[1].begin(), seen[1].end(), seen[2].begin()));
  auto sorted_full = seen[2];
  auto sorted_train = train;
  std::sort(sorted_full.begin(), sorted_full.end());
  std::sort(sorted_train.begin(), sorted_train.end());
  EXPECT_EQ(sorted_full, sorted_train);
  EXPECT_EQ(format_curve_csv(points),
            "fraction,train_size,recall_at_1\n0.25,10,0.25\n0.5,20,0.5\n1,40,1\n");
  const std::vector<double> bad{0.0};
  EXPECT_THROW(learning_curve(train, {}, bad, trainer, 3), ValidationError);
}

TEST(CorpusIo, RoundTrip) {
  std::vector<Dialogue> ds{toy("#c/2013-01-02/0000", 3, 10, 1), toy("#c/2013-01-02/0001", 4, 30, 2)};
  for (auto& d : ds) {
    d.channel = "#c";
    d.turns[1].recipient = "a";
    d.turns[2].text = "has\ttab";
  }
  const std::string text = format_corpus(ds);
  const auto back = parse_corpus(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, ds[0].id);
  EXPECT_EQ(back[0].turns.size(), 3u);
  EXPECT_EQ(back[0].turns[2].text, "has tab");
  EXPECT_EQ(back[0].turns[1].recipient, "a");
  EXPECT_EQ(back[1].turns[3].minute, 36);
  EXPECT_EQ(back[0].participants[0], "a");
  EXPECT_EQ(back[0].participants[1], "b");
  EXPECT_EQ(format_corpus(back), text);
}

TEST(KeywordTask, ShapeAndCoverage) {
  KeywordTaskConfig kc;
  kc.keywords = 30;
  kc.train_positives = 30;
  kc.test_records = 20;
  const KeywordTask task = make_keyword_task(kc);
  ASSERT_EQ(task.train.size(), 60u);
  ASSERT_EQ(task.test.size(), 20u);
  std::set<std::string> keywords;
  for (const auto& t : task.train) {
    for (const auto& tok : tokenize(t.context)) {
      if (tok.starts_with("kw")) keywords.insert(tok);
      EXPECT_FALSE(tok.starts_with("rw"));  // fillers never cross sides
    }
  }
  EXPECT_EQ(keywords.size(), 30u);
  for (const auto& r : task.test) EXPECT_EQ(r.distractors.size(), 9u);
  kc.train_positives = 29;
  EXPECT_THROW(make_keyword_task(kc), ValidationError);
  kc.keywords = 9;
  EXPECT_THROW(make_keyword_task(kc), ValidationError);
}
