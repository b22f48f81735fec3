#pragma once

// Recall@k evaluation, corpus statistics and the training-size curve.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/disentangle.hpp"
#include "dyadic/tfidf.hpp"
#include "dyadic/triples.hpp"

namespace dyadic {

// Returns candidates best first (ScoredCandidate::index into `candidates`).
using Ranker = std::function<std::vector<ScoredCandidate>(std::string_view context,
                                                          std::span<const std::string> candidates)>;

// Fraction of records whose true response has 1-based rank <= k.
double recall_at_k(std::span<const std::size_t> true_ranks, std::size_t k);

struct RecallReport {
  std::string setting;  // "1-in-2", "1-in-10", ...
  std::size_t n_records = 0;
  std::size_t candidates = 0;
  std::map<std::size_t, double> recall;  // k -> R@k, only for k < candidates

  double at(std::size_t k) const { return recall.at(k); }
};

struct EvalOptions {
  std::vector<std::size_t> ks{1, 2, 5};
  // Use only the first n distractors of each record (e.g. 1-in-2 from a
  // 1-in-10 file). Defaults to all of them.
  std::optional<std::size_t> negatives;
  // Candidate order is shuffled per record with this seed before ranking.
  std::uint64_t seed = 0;
};

/// 1-based rank of the true response for every record.
std::vector<std::size_t> true_response_ranks(const Ranker& ranker,
                                             std::span<const TestRecord> records,
                                             const EvalOptions& opts = {});

RecallReport evaluate_ranker(const Ranker& ranker, std::span<const TestRecord> records,
                             const EvalOptions& opts = {});

std::string format_report_text(const RecallReport& report);
std::string format_report_csv(const RecallReport& report);

struct CorpusStats {
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  std::size_t words = 0;
  std::size_t min_turns = 0;
  double avg_turns = 0.0;
  double avg_words_per_utterance = 0.0;
  double median_duration_minutes = 0.0;
  std::map<std::size_t, std::size_t> turn_histogram;  // turns -> dialogues
  // Least-squares slope of log(count) against log(turns); needs >= 2 bins.
  std::optional<double> loglog_slope;
};

CorpusStats corpus_stats(std::span<const Dialogue> dialogues);
std::string format_stats_text(const CorpusStats& stats);
std::string format_histogram_csv(const CorpusStats& stats);

struct CurvePoint {
  double fraction = 0.0;
  std::size_t train_size = 0;
  double recall_at_1 = 0.0;
};

// Trains on the first size(fraction) triples of `train` (already shuffled
// by the caller) and returns R@1 on `test`.
using CurveTrainer =
    std::function<double(std::span<const Triple> train, std::span<const TestRecord> test)>;

/// Shuffles `train` once with `seed`, then evaluates nested prefixes.
std::vector<CurvePoint> learning_curve(std::span<const Triple> train,
                                       std::span<const TestRecord> test,
                                       std::span<const double> fractions,
                                       const CurveTrainer& trainer, std::uint64_t seed);

std::string format_curve_csv(std::span<const CurvePoint> points);

}  // namespace dyadic
