#include "dyadic/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyadic/preprocess.hpp"

namespace dyadic {

double recall_at_k(std::span<const std::size_t> true_ranks, std::size_t k) {
  if (true_ranks.empty()) return 0.0;
  const auto hits = std::count_if(true_ranks.begin(), true_ranks.end(),
                                  [k](std::size_t r) { return r >= 1 && r <= k; });
  return static_cast<double>(hits) / static_cast<double>(true_ranks.size());
}

std::vector<std::size_t> true_response_ranks(const Ranker& ranker,
                                             std::span<const TestRecord> records,
                                             const EvalOptions& opts) {
  std::vector<std::size_t> ranks;
  ranks.reserve(records.size());
  std::vector<std::string> candidates;
  std::vector<std::size_t> perm;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const TestRecord& rec = records[r];
    const std::size_t k = opts.negatives.value_or(rec.distractors.size());
    if (k == 0 || k > rec.distractors.size())
      throw ValidationError("record " + std::to_string(r + 1) + " has " +
                            std::to_string(rec.distractors.size()) + " distractors, need " +
                            std::to_string(k));
    perm.resize(k + 1);
    for (std::size_t i = 0; i <= k; ++i) perm[i] = i;
    Rng rng(derive_seed(opts.seed, r));
    rng.shuffle(perm);

    // perm[slot] = original position (0 = true response)
    candidates.clear();
    std::size_t true_slot = 0;
    for (std::size_t slot = 0; slot <= k; ++slot) {
      if (perm[slot] == 0) {
        true_slot = slot;
        candidates.push_back(rec.true_response);
      } else {
        candidates.push_back(rec.distractors[perm[slot] - 1]);
      }
    }
    const auto ranking = ranker(rec.context, candidates);
    auto it = std::find_if(ranking.begin(), ranking.end(),
                           [&](const ScoredCandidate& s) { return s.index == true_slot; });
    ranks.push_back(it == ranking.end() ? candidates.size() + 1
                                        : static_cast<std::size_t>(it - ranking.begin()) + 1);
  }
  return ranks;
}

RecallReport evaluate_ranker(const Ranker& ranker, std::span<const TestRecord> records,
                             const EvalOptions& opts) {
  RecallReport report;
  report.n_records = records.size();
  std::size_t k = opts.negatives.value_or(records.empty() ? 0 : records.front().distractors.size());
  report.candidates = k + 1;
  report.setting = "1-in-" + std::to_string(report.candidates);
  const auto ranks = true_response_ranks(ranker, records, opts);
  for (std::size_t kk : opts.ks)
    if (kk < report.candidates || kk == 1) report.recall[kk] = recall_at_k(ranks, kk);
  return report;
}

std::string format_report_text(const RecallReport& report) {
  std::string out = report.setting + " (" + std::to_string(report.n_records) + " records)\n";
  for (auto [k, v] : report.recall) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  R@%zu = %.4f\n", k, v);
    out += buf;
  }
  return out;
}

std::string format_report_csv(const RecallReport& report) {
  std::string out = "setting,k,recall,n_records\n";
  for (auto [k, v] : report.recall)
    out += report.setting + "," + std::to_string(k) + "," + format_double(v) + "," +
           std::to_string(report.n_records) + "\n";
  return out;
}

CorpusStats corpus_stats(std::span<const Dialogue> dialogues) {
  CorpusStats s;
  s.dialogues = dialogues.size();
  if (dialogues.empty()) return s;
  std::vector<std::int64_t> durations;
  durations.reserve(dialogues.size());
  s.min_turns = dialogues.front().turns.size();
  for (const auto& d : dialogues) {
    s.utterances += d.turns.size();
    s.min_turns = std::min(s.min_turns, d.turns.size());
    ++s.turn_histogram[d.turns.size()];
    for (const auto& t : d.turns) s.words += tokenize(t.text).size();
    if (!d.turns.empty()) {
      const auto& first = d.turns.front();
      const auto& last = d.turns.back();
      durations.push_back(absolute_minute(last.day, last.minute) -
                          absolute_minute(first.day, first.minute));
    }
  }
  s.avg_turns = static_cast<double>(s.utterances) / static_cast<double>(s.dialogues);
  if (s.utterances)
    s.avg_words_per_utterance = static_cast<double>(s.words) / static_cast<double>(s.utterances);
  std::sort(durations.begin(), durations.end());
  const std::size_t n = durations.size();
  if (n) {
    s.median_duration_minutes =
        n % 2 ? static_cast<double>(durations[n / 2])
              : 0.5 * static_cast<double>(durations[n / 2 - 1] + durations[n / 2]);
  }

  std::vector<double> xs, ys;
  for (auto [turns, count] : s.turn_histogram) {
    if (turns == 0) continue;
    xs.push_back(std::log(static_cast<double>(turns)));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    s.loglog_slope = sxy / sxx;
  }
  return s;
}

std::string format_stats_text(const CorpusStats& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "dialogues                 %zu\n"
                "utterances                %zu\n"
                "words                     %zu\n"
                "min turns per dialogue    %zu\n"
                "avg turns per dialogue    %.2f\n"
                "avg words per utterance   %.2f\n"
                "median duration (min)     %.1f\n",
                s.dialogues, s.utterances, s.words, s.min_turns, s.avg_turns,
                s.avg_words_per_utterance, s.median_duration_minutes);
  std::string out = buf;
  if (s.loglog_slope) {
    std::snprintf(buf, sizeof(buf), "log-log turn slope        %.3f\n", *s.loglog_slope);
    out += buf;
  }
  return out;
}

std::string format_histogram_csv(const CorpusStats& stats) {
  std::string out = "turns,count\n";
  for (auto [turns, count] : stats.turn_histogram)
    out += std::to_string(turns) + "," + std::to_string(count) + "\n";
  return out;
}

std::vector<CurvePoint> learning_curve(std::span<const Triple> train,
                                       std::span<const TestRecord> test,
                                       std::span<const double> fractions,
                                       const CurveTrainer& trainer, std::uint64_t seed) {
  std::vector<Triple> shuffled(train.begin(), train.end());
  Rng rng(seed);
  rng.shuffle(shuffled);
  std::vector<CurvePoint> out;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ValidationError("curve fractions must lie in (0, 1]");
    const auto size = static_cast<std::size_t>(std::llround(f * static_cast<double>(shuffled.size())));
    const auto prefix = std::span<const Triple>(shuffled).first(std::min(size, shuffled.size()));
    out.push_back({f, prefix.size(), trainer(prefix, test)});
  }
  return out;
}

std::string format_curve_csv(std::span<const CurvePoint> points) {
  std::string out = "fraction,train_size,recall_at_1\n";
  for (const auto& p : points)
    out += format_double(p.fraction) + "," + std::to_string(p.train_size) + "," +
           format_double(p.recall_at_1) + "\n";
  return out;
}

}  // namespace dyadic
